import { GatewayClient } from "../api.js";
import { barChart } from "../charts.js";
import { errorText, esc, showNotice } from "../dom.js";
import type { MonthlyStats, Tour, TourStats, TypeStats } from "../types.js";

/**
 * Usage statistics page: monthly run counts and the tour-type split, each as
 * a table plus bar chart, with a per-tour drill-down panel.
 */
export class StatsPage {
  private monthly: MonthlyStats | null = null;
  private types: TypeStats | null = null;
  private tours: Tour[] = [];
  private detail: { tour: Tour; stats: TourStats } | null = null;
  private months: number | undefined;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
  ) {}

  async load(): Promise<void> {
    try {
      [this.monthly, this.types, this.tours] = await Promise.all([
        this.client.statsMonthly(this.months),
        this.client.statsTypes(this.months),
        this.client.listTours(),
      ]);
    } catch (err) {
      this.render();
      showNotice(this.root, errorText(err), "error");
      return;
    }
    this.render();
  }

  private render(): void {
    this.root.innerHTML = `
      <div class="notice" hidden></div>
      <section class="panel">
        <div class="panel-head">
          <h2>Runs per month</h2>
          <label>Window (months)
            <input class="months-input" type="number" min="1" value="${this.months ?? ""}"
                   placeholder="6">
          </label>
        </div>
        <div class="monthly-section"></div>
      </section>
      <section class="panel">
        <h2>Runs by tour type</h2>
        <div class="types-section"></div>
      </section>
      <section class="panel">
        <h2>Per tour</h2>
        <div class="tour-picker"></div>
        <div class="tour-detail"></div>
      </section>
    `;

    this.renderMonthly();
    this.renderTypes();
    this.renderPicker();
    this.renderDetail();

    const monthsInput = this.root.querySelector<HTMLInputElement>(".months-input")!;
    monthsInput.addEventListener("change", () => {
      const parsed = Number(monthsInput.value);
      this.months = monthsInput.value === "" || !Number.isFinite(parsed) ? undefined : parsed;
      void this.load();
    });
  }

  private renderMonthly(): void {
    const box = this.root.querySelector<HTMLElement>(".monthly-section")!;
    const monthly = this.monthly;
    if (!monthly) return;
    if (monthly.total === 0) {
      box.innerHTML = `<p class="empty">No runs recorded in this window.</p>`;
      return;
    }
    box.innerHTML = `
      <table class="monthly-table">
        <thead><tr><th>Month</th><th>Runs</th></tr></thead>
        <tbody>
          ${monthly.months
            .map(
              (m) => `
            <tr class="month-row">
              <td class="month-label">${esc(m.month)}</td>
              <td class="month-count">${m.run_count}</td>
            </tr>`,
            )
            .join("")}
        </tbody>
        <tfoot><tr><td>total</td><td class="monthly-total">${monthly.total}</td></tr></tfoot>
      </table>
    `;
    const chart = barChart(
      monthly.months.map((m) => ({ label: m.month, value: m.run_count })),
      "chart monthly-chart",
    );
    box.appendChild(chart);
  }

  private renderTypes(): void {
    const box = this.root.querySelector<HTMLElement>(".types-section")!;
    const types = this.types;
    if (!types) return;
    const entries = Object.entries(types.counts);
    if (types.total === 0 || entries.length === 0) {
      box.innerHTML = `<p class="empty">No runs recorded in this window.</p>`;
      return;
    }
    box.innerHTML = `
      <table class="types-table">
        <thead><tr><th>Type</th><th>Runs</th></tr></thead>
        <tbody>
          ${entries
            .map(
              ([type, count]) => `
            <tr class="type-row">
              <td class="type-label">${esc(type || "untyped")}</td>
              <td class="type-count">${count}</td>
            </tr>`,
            )
            .join("")}
        </tbody>
        <tfoot><tr><td>total</td><td class="types-total">${types.total}</td></tr></tfoot>
      </table>
    `;
    const chart = barChart(
      entries.map(([type, count]) => ({ label: type || "untyped", value: count })),
      "chart types-chart",
    );
    box.appendChild(chart);
  }

  private renderPicker(): void {
    const box = this.root.querySelector<HTMLElement>(".tour-picker")!;
    box.innerHTML = this.tours
      .map(
        (t) =>
          `<button class="tour-pick" data-tour-id="${esc(t.id)}">${esc(t.name)}</button>`,
      )
      .join(" ");
    for (const btn of box.querySelectorAll<HTMLButtonElement>(".tour-pick")) {
      btn.addEventListener("click", () => {
        void this.pick(btn.dataset.tourId!);
      });
    }
  }

  private renderDetail(): void {
    const box = this.root.querySelector<HTMLElement>(".tour-detail")!;
    if (!this.detail) {
      box.innerHTML = `<p class="empty">Pick a tour to see its history.</p>`;
      return;
    }
    const { tour, stats } = this.detail;
    if (stats.total_runs === 0) {
      box.innerHTML = `
        <h3 class="detail-name">${esc(tour.name)}</h3>
        <p class="detail-empty empty">No runs recorded for this tour.</p>
      `;
      return;
    }
    const mean =
      stats.mean_duration_seconds === null ? "n/a" : `${stats.mean_duration_seconds.toFixed(1)} s`;
    box.innerHTML = `
      <h3 class="detail-name">${esc(tour.name)}</h3>
      <dl class="detail-grid">
        <dt>Total runs</dt><dd data-field="total_runs">${stats.total_runs}</dd>
        <dt>Completed</dt><dd data-field="completed">${stats.completed}</dd>
        <dt>Aborted</dt><dd data-field="aborted">${stats.aborted}</dd>
        <dt>Failed</dt><dd data-field="failed">${stats.failed}</dd>
        <dt>Mean completed duration</dt><dd data-field="mean">${mean}</dd>
        <dt>Last run</dt><dd data-field="last_run">${esc(stats.last_run_at ?? "never")}</dd>
      </dl>
    `;
  }

  private async pick(tourId: string): Promise<void> {
    const tour = this.tours.find((t) => t.id === tourId);
    if (!tour) return;
    try {
      this.detail = { tour, stats: await this.client.statsTour(tourId) };
    } catch (err) {
      showNotice(this.root, errorText(err), "error");
      return;
    }
    this.renderDetail();
  }
}
