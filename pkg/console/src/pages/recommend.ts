import { GatewayClient, RecommendParams } from "../api.js";
import { clearNotice, errorText, esc, fmtDuration, showNotice } from "../dom.js";
import type { Recommendation } from "../types.js";

/**
 * Recommendation page: most-popular tours by default, or a filtered ranking
 * from the parameter form (type, maximum duration, list size).
 */
export class RecommendPage {
  private items: Recommendation[] = [];
  private params: RecommendParams | undefined;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
  ) {}

  async load(): Promise<void> {
    try {
      this.items = await this.client.recommendations(this.params);
    } catch (err) {
      this.render();
      showNotice(this.root, errorText(err), "error");
      return;
    }
    this.render();
  }

  private render(): void {
    const p = this.params;
    this.root.innerHTML = `
      <div class="notice" hidden></div>
      <section class="panel">
        <div class="panel-head">
          <h2>${p ? "Matching tours" : "Most popular tours"}</h2>
          <form class="recommend-form">
            <label>Type <input class="rec-type" type="text" value="${esc(p?.type ?? "")}"
                               placeholder="any"></label>
            <label>Max duration (s) <input class="rec-duration" type="number" min="1"
                               value="${p?.maxDuration ?? ""}"></label>
            <label>Show top <input class="rec-k" type="number" min="1"
                               value="${p?.k ?? ""}" placeholder="5"></label>
            <button class="rec-apply" type="submit">Apply</button>
            <button class="rec-reset" type="button">Reset</button>
          </form>
        </div>
        <ol class="recommend-list"></ol>
      </section>
    `;

    const list = this.root.querySelector<HTMLElement>(".recommend-list")!;
    if (this.items.length === 0) {
      list.innerHTML = `<p class="empty">No tours match these criteria.</p>`;
    }
    for (const item of this.items) {
      const li = document.createElement("li");
      li.className = "recommend-row";
      li.dataset.tourId = item.tour.id;
      li.innerHTML = `
        <span class="rec-name">${esc(item.tour.name)}</span>
        <span class="rec-meta">${esc(item.tour.tour_type || "untyped")},
          ${fmtDuration(item.tour.expected_duration)}</span>
        <span class="rec-count">${item.run_count} completed</span>
        <button class="rec-execute">Execute</button>
      `;
      li.querySelector(".rec-execute")?.addEventListener("click", () => {
        void this.onExecute(item);
      });
      list.appendChild(li);
    }

    this.root.querySelector<HTMLFormElement>(".recommend-form")?.addEventListener("submit", (ev) => {
      ev.preventDefault();
      this.applyForm();
    });
    this.root.querySelector(".rec-reset")?.addEventListener("click", () => {
      this.params = undefined;
      void this.load();
    });
  }

  private applyForm(): void {
    const read = (sel: string) => this.root.querySelector<HTMLInputElement>(sel)!.value.trim();
    const type = read(".rec-type");
    const duration = read(".rec-duration");
    const k = read(".rec-k");
    const params: RecommendParams = {};
    if (type) params.type = type;
    if (duration) params.maxDuration = Number(duration);
    if (k) params.k = Number(k);
    this.params = Object.keys(params).length ? params : undefined;
    void this.load();
  }

  private async onExecute(item: Recommendation): Promise<void> {
    clearNotice(this.root);
    try {
      await this.client.executeTour(item.tour.id);
      showNotice(this.root, `Started "${item.tour.name}"`);
    } catch (err) {
      showNotice(this.root, errorText(err), "error");
    }
  }
}
