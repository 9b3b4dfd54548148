import { GatewayClient } from "../api.js";
import { clearNotice, errorText, esc, fmtDuration, showNotice } from "../dom.js";
import type { Location, ProgressMsg, Tour } from "../types.js";

const TERMINAL_PHASES = new Set(["done", "aborted", "failed"]);

export interface TourPageActions {
  onCreateTour(): void;
  onEditTour(tour: Tour): void;
  onEditLocation(location: Location): void;
}

/**
 * Tour management page: searchable tour list with expandable stops, the
 * location catalog, and execute/abort with live per-stop progress.
 */
export class ToursPage {
  private tours: Tour[] = [];
  private locations: Location[] = [];
  private query = "";
  private expanded = new Set<string>();
  private progress: ProgressMsg | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
    private readonly actions: TourPageActions,
  ) {}

  async load(): Promise<void> {
    try {
      if (this.query.trim()) {
        const found = await this.client.search(this.query.trim());
        this.tours = found.tours;
        this.locations = found.locations;
      } else {
        [this.tours, this.locations] = await Promise.all([
          this.client.listTours(),
          this.client.listLocations(),
        ]);
      }
    } catch (err) {
      this.render();
      showNotice(this.root, errorText(err), "error");
      return;
    }
    this.render();
  }

  /** Live frame from /tour/progress. */
  applyProgress(msg: ProgressMsg): void {
    const finished = TERMINAL_PHASES.has(msg.phase);
    this.progress = finished ? null : msg;
    this.renderProgress();
    if (finished) {
      const tour = this.tours.find((t) => t.id === msg.tour_id);
      showNotice(this.root, `Tour "${tour?.name ?? msg.tour_id}" ${msg.phase}`);
    }
  }

  private locationName(id: string): string {
    return this.locations.find((l) => l.id === id)?.name ?? id;
  }

  private render(): void {
    this.root.innerHTML = `
      <div class="notice" hidden></div>
      <section class="panel">
        <div class="panel-head">
          <h2>Tours</h2>
          <input class="tour-search" type="search" placeholder="Search tours and locations"
                 value="${esc(this.query)}">
          <button class="tour-create">New tour</button>
          <button class="tour-abort">Abort run</button>
        </div>
        <div class="tour-list"></div>
      </section>
      <section class="panel">
        <h2>Locations</h2>
        <div class="location-list"></div>
      </section>
    `;

    const list = this.root.querySelector<HTMLElement>(".tour-list")!;
    if (this.tours.length === 0) {
      list.innerHTML = `<p class="empty">No tours${this.query ? " match the search" : " yet"}.</p>`;
    }
    for (const tour of this.tours) list.appendChild(this.tourRow(tour));

    const locList = this.root.querySelector<HTMLElement>(".location-list")!;
    if (this.locations.length === 0) {
      locList.innerHTML = `<p class="empty">No locations${this.query ? " match the search" : " yet"}.</p>`;
    }
    for (const location of this.locations) locList.appendChild(this.locationRow(location));

    const search = this.root.querySelector<HTMLInputElement>(".tour-search")!;
    search.addEventListener("input", () => {
      this.query = search.value;
      void this.load();
    });
    this.root.querySelector(".tour-create")?.addEventListener("click", () => {
      this.actions.onCreateTour();
    });
    this.root.querySelector(".tour-abort")?.addEventListener("click", () => {
      void this.onAbort();
    });
    this.renderProgress();
  }

  private tourRow(tour: Tour): HTMLElement {
    const row = document.createElement("article");
    row.className = "tour-row";
    row.dataset.tourId = tour.id;
    const open = this.expanded.has(tour.id);
    row.innerHTML = `
      <div class="tour-head">
        <button class="tour-toggle">${open ? "▾" : "▸"}</button>
        <span class="tour-name">${esc(tour.name)}</span>
        <span class="tour-type badge">${esc(tour.tour_type || "untyped")}</span>
        <span class="tour-duration">${fmtDuration(tour.expected_duration)}</span>
        <span class="tour-stops">${tour.stops.length} stops</span>
        <span class="tour-phase badge" hidden></span>
        <span class="tour-actions">
          <button class="tour-execute">Execute</button>
          <button class="tour-copy">Copy</button>
          <button class="tour-edit">Edit</button>
          <button class="tour-delete">Delete</button>
        </span>
      </div>
      ${
        open
          ? `<ol class="stop-list">${tour.stops
              .map((s) => {
                const note =
                  s.speech_override === null
                    ? ""
                    : s.speech_override === ""
                      ? ` <i class="stop-note">(silent)</i>`
                      : ` <i class="stop-note">(custom speech)</i>`;
                return `<li class="stop" data-location-id="${esc(s.location_id)}">${esc(
                  this.locationName(s.location_id),
                )}${note}</li>`;
              })
              .join("")}</ol>`
          : ""
      }
    `;
    row.querySelector(".tour-toggle")?.addEventListener("click", () => {
      if (open) this.expanded.delete(tour.id);
      else this.expanded.add(tour.id);
      this.render();
    });
    row.querySelector(".tour-execute")?.addEventListener("click", () => {
      void this.onExecute(tour);
    });
    row.querySelector(".tour-copy")?.addEventListener("click", () => {
      void this.onCopy(tour);
    });
    row.querySelector(".tour-edit")?.addEventListener("click", () => {
      this.actions.onEditTour(tour);
    });
    row.querySelector(".tour-delete")?.addEventListener("click", () => {
      void this.onDeleteTour(tour);
    });
    return row;
  }

  private locationRow(location: Location): HTMLElement {
    const row = document.createElement("article");
    row.className = "location-row";
    row.dataset.locationId = location.id;
    const { x, y } = location.pose;
    row.innerHTML = `
      <span class="location-name">${esc(location.name)}</span>
      <span class="location-pose">(${x.toFixed(2)}, ${y.toFixed(2)})</span>
      <span class="location-desc">${esc(location.description)}</span>
      <span class="location-actions">
        <button class="location-edit">Edit</button>
        <button class="location-delete">Delete</button>
      </span>
    `;
    row.querySelector(".location-edit")?.addEventListener("click", () => {
      this.actions.onEditLocation(location);
    });
    row.querySelector(".location-delete")?.addEventListener("click", () => {
      void this.onDeleteLocation(location);
    });
    return row;
  }

  private renderProgress(): void {
    const progress = this.progress;
    for (const row of this.root.querySelectorAll<HTMLElement>(".tour-row")) {
      const badge = row.querySelector<HTMLElement>(".tour-phase");
      const active = progress !== null && row.dataset.tourId === progress.tour_id;
      if (badge) {
        badge.hidden = !active;
        if (active) badge.textContent = `${progress.phase} @ stop ${progress.stop_index + 1}`;
      }
      row.querySelectorAll<HTMLElement>(".stop").forEach((stop, index) => {
        if (active && index === progress.stop_index) {
          stop.classList.add("stop-active");
          stop.dataset.phase = progress.phase;
        } else {
          stop.classList.remove("stop-active");
          delete stop.dataset.phase;
        }
      });
    }
  }

  private async onExecute(tour: Tour): Promise<void> {
    clearNotice(this.root);
    try {
      await this.client.executeTour(tour.id);
      showNotice(this.root, `Started "${tour.name}"`);
    } catch (err) {
      showNotice(this.root, errorText(err), "error");
    }
  }

  private async onAbort(): Promise<void> {
    clearNotice(this.root);
    try {
      const run = await this.client.abortExecution();
      this.progress = null;
      this.renderProgress();
      showNotice(this.root, `Aborted after ${run.stops_visited} stops`);
    } catch (err) {
      showNotice(this.root, errorText(err), "error");
    }
  }

  private async onCopy(tour: Tour): Promise<void> {
    clearNotice(this.root);
    try {
      const copy = await this.client.copyTour(tour.id);
      await this.load();
      showNotice(this.root, `Copied to "${copy.name}"`);
    } catch (err) {
      showNotice(this.root, errorText(err), "error");
    }
  }

  private async onDeleteTour(tour: Tour): Promise<void> {
    clearNotice(this.root);
    try {
      await this.client.deleteTour(tour.id);
      await this.load();
      showNotice(this.root, `Deleted "${tour.name}"`);
    } catch (err) {
      showNotice(this.root, errorText(err), "error");
    }
  }

  private async onDeleteLocation(location: Location): Promise<void> {
    clearNotice(this.root);
    try {
      await this.client.deleteLocation(location.id);
      await this.load();
      showNotice(this.root, `Deleted "${location.name}"`);
    } catch (err) {
      // in-use rejections name the referencing tours; show that verbatim
      showNotice(this.root, errorText(err), "error");
    }
  }
}
