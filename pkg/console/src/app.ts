import { GatewayClient } from "./api.js";
import { errorText, showNotice } from "./dom.js";
import { EventSocket } from "./events.js";
import { ControlPage } from "./pages/control.js";
import { openLocationEditor, openTourEditor } from "./pages/editors.js";
import { RecommendPage } from "./pages/recommend.js";
import { StatsPage } from "./pages/stats.js";
import { ToursPage } from "./pages/tours.js";
import type { Location, Pose, ProgressMsg, Tour } from "./types.js";

type TabName = "control" | "tours" | "stats" | "recommend";

const TABS: { name: TabName; label: string }[] = [
  { name: "control", label: "Control" },
  { name: "tours", label: "Tours" },
  { name: "stats", label: "Statistics" },
  { name: "recommend", label: "Recommendations" },
];

/** Shell that owns the tabs, the pages, the editor modal, and the event socket. */
export class App {
  readonly control: ControlPage;
  readonly tours: ToursPage;
  readonly stats: StatsPage;
  readonly recommend: RecommendPage;
  private readonly modal: HTMLElement;
  private active: TabName = "control";

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
    private readonly events: EventSocket,
  ) {
    root.innerHTML = `
      <header class="topbar">
        <h1>Tour robot console</h1>
        <nav class="tabs">
          ${TABS.map(
            (t) => `<button class="tab" data-tab="${t.name}">${t.label}</button>`,
          ).join("")}
        </nav>
        <span class="conn-badge badge">connecting…</span>
      </header>
      <main>
        ${TABS.map((t) => `<div class="page page-${t.name}" hidden></div>`).join("")}
      </main>
      <div class="modal-root" hidden></div>
    `;
    this.modal = root.querySelector<HTMLElement>(".modal-root")!;

    const pageRoot = (name: TabName) => root.querySelector<HTMLElement>(`.page-${name}`)!;
    this.control = new ControlPage(pageRoot("control"), client);
    this.tours = new ToursPage(pageRoot("tours"), client, {
      onCreateTour: () => void this.editTour(null),
      onEditTour: (tour) => void this.editTour(tour),
      onEditLocation: (location) => this.editLocation(location),
    });
    this.stats = new StatsPage(pageRoot("stats"), client);
    this.recommend = new RecommendPage(pageRoot("recommend"), client);

    for (const btn of root.querySelectorAll<HTMLButtonElement>(".tab")) {
      btn.addEventListener("click", () => {
        void this.showTab(btn.dataset.tab as TabName);
      });
    }

    events.on("/robot/pose", (msg) => this.control.updatePose(msg as Pose));
    events.on("/tour/progress", (msg) => this.tours.applyProgress(msg as ProgressMsg));
    events.onStatus((connected) => {
      const badge = root.querySelector<HTMLElement>(".conn-badge");
      if (badge) {
        badge.textContent = connected ? "live" : "offline";
        badge.classList.toggle("badge-offline", !connected);
      }
      this.control.setConnected(connected);
    });
  }

  async start(): Promise<void> {
    this.events.connect();
    await this.showTab("control");
  }

  async showTab(name: TabName): Promise<void> {
    this.active = name;
    for (const tab of TABS) {
      this.root.querySelector<HTMLElement>(`.page-${tab.name}`)!.hidden = tab.name !== name;
      this.root
        .querySelector<HTMLElement>(`.tab[data-tab="${tab.name}"]`)!
        .classList.toggle("tab-active", tab.name === name);
    }
    await this.page(name).load();
  }

  stop(): void {
    this.events.close();
  }

  private page(name: TabName): { load(): Promise<void> } {
    switch (name) {
      case "control":
        return this.control;
      case "tours":
        return this.tours;
      case "stats":
        return this.stats;
      case "recommend":
        return this.recommend;
    }
  }

  private async editTour(tour: Tour | null): Promise<void> {
    let locations: Location[];
    try {
      locations = await this.client.listLocations();
    } catch (err) {
      showNotice(this.root.querySelector<HTMLElement>(`.page-${this.active}`)!, errorText(err), "error");
      return;
    }
    this.modal.hidden = false;
    openTourEditor(this.modal, this.client, tour, locations, {
      onSaved: () => {
        this.closeModal();
        void this.tours.load();
      },
      onClose: () => this.closeModal(),
    });
  }

  private editLocation(location: Location): void {
    this.modal.hidden = false;
    openLocationEditor(this.modal, this.client, location, {
      onSaved: () => {
        this.closeModal();
        void this.tours.load();
      },
      onClose: () => this.closeModal(),
    });
  }

  private closeModal(): void {
    this.modal.hidden = true;
    this.modal.innerHTML = "";
  }
}
