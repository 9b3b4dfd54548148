import { ApiError, GatewayClient } from "../api.js";
import { clearNotice, errorText, esc, fmt, showNotice } from "../dom.js";
import type { Pose, RobotStatus, TeleopDirection } from "../types.js";

const DIRECTIONS: { dir: TeleopDirection; label: string }[] = [
  { dir: "forward", label: "Forward" },
  { dir: "back", label: "Back" },
  { dir: "rotate_left", label: "Turn left" },
  { dir: "rotate_right", label: "Turn right" },
];

/**
 * Manual driving page: teleop pad, live pose readout, and a form that saves
 * the robot's current spot as a named location.
 */
export class ControlPage {
  private status: RobotStatus | null = null;
  private connected = true;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
  ) {}

  async load(): Promise<void> {
    try {
      this.status = await this.client.robotStatus();
      this.connected = true;
    } catch (err) {
      this.status = null;
      this.connected = false;
      this.render();
      showNotice(this.root, errorText(err), "error");
      return;
    }
    this.render();
  }

  /** Live frame from /robot/pose: update the readout without a full render. */
  updatePose(pose: Pose): void {
    if (this.status) this.status = { ...this.status, pose };
    this.renderPose(pose);
  }

  setConnected(connected: boolean): void {
    if (connected === this.connected) return;
    this.connected = connected;
    if (connected) {
      void this.load();
    } else {
      this.render();
      showNotice(this.root, "gateway unreachable, controls disabled", "error");
    }
  }

  private render(): void {
    const pose = this.status?.pose ?? { x: 0, y: 0, theta: 0 };
    const mode = this.status?.mode ?? "unknown";
    const disabled = this.connected ? "" : "disabled";
    this.root.innerHTML = `
      <div class="notice" hidden></div>
      <section class="panel">
        <h2>Robot</h2>
        <div class="pose-readout">
          x <b class="pose-x">${fmt(pose.x)}</b> m,
          y <b class="pose-y">${fmt(pose.y)}</b> m,
          heading <b class="pose-theta">${fmt(pose.theta)}</b> rad
          <span class="robot-mode badge">${esc(mode)}</span>
        </div>
        <div class="teleop-pad">
          ${DIRECTIONS.map(
            (d) => `
            <button class="teleop-btn" data-direction="${d.dir}" ${disabled}>${d.label}</button>`,
          ).join("")}
        </div>
      </section>
      <section class="panel">
        <h2>Save this spot</h2>
        <form class="save-location">
          <label>Name <input class="loc-name" type="text" ${disabled}></label>
          <label>Description <textarea class="loc-desc" rows="2" ${disabled}></textarea></label>
          <span class="field-error loc-error" hidden></span>
          <button class="loc-save" type="submit" ${disabled}>Save location</button>
        </form>
      </section>
    `;

    for (const btn of this.root.querySelectorAll<HTMLButtonElement>(".teleop-btn")) {
      btn.addEventListener("click", () => {
        void this.onTeleop(btn.dataset.direction as TeleopDirection);
      });
    }
    this.root.querySelector<HTMLFormElement>(".save-location")?.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.onSaveLocation();
    });
  }

  private renderPose(pose: Pose): void {
    const set = (sel: string, value: number) => {
      const span = this.root.querySelector<HTMLElement>(sel);
      if (span) span.textContent = fmt(value);
    };
    set(".pose-x", pose.x);
    set(".pose-y", pose.y);
    set(".pose-theta", pose.theta);
  }

  private renderMode(mode: string): void {
    const badge = this.root.querySelector<HTMLElement>(".robot-mode");
    if (badge) badge.textContent = mode;
  }

  private async onTeleop(direction: TeleopDirection): Promise<void> {
    clearNotice(this.root);
    try {
      const status = await this.client.teleop(direction);
      this.status = status;
      this.renderPose(status.pose);
      this.renderMode(status.mode);
    } catch (err) {
      showNotice(this.root, errorText(err), "error");
    }
  }

  private async onSaveLocation(): Promise<void> {
    const nameInput = this.root.querySelector<HTMLInputElement>(".loc-name")!;
    const descInput = this.root.querySelector<HTMLTextAreaElement>(".loc-desc")!;
    const fieldError = this.root.querySelector<HTMLElement>(".loc-error")!;
    const name = nameInput.value.trim();
    if (!name) {
      fieldError.textContent = "name is required";
      fieldError.hidden = false;
      return;
    }
    fieldError.hidden = true;
    try {
      const saved = await this.client.saveLocation(name, descInput.value);
      nameInput.value = "";
      descInput.value = "";
      showNotice(
        this.root,
        `Saved "${saved.name}" at (${fmt(saved.pose.x)}, ${fmt(saved.pose.y)})`,
      );
    } catch (err) {
      // keep what the operator typed so a rename is a one-field fix
      if (err instanceof ApiError && err.status === 409) {
        fieldError.textContent = err.message;
        fieldError.hidden = false;
      } else {
        showNotice(this.root, errorText(err), "error");
      }
    }
  }
}
