import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { WebSocket as NodeWebSocket } from "ws";

import { GatewayClient } from "../src/api.js";
import { EventSocket, type SocketCtor } from "../src/events.js";
import { ControlPage } from "../src/pages/control.js";
import type { Location, RobotStatus } from "../src/types.js";
import { freshRoot, getJson, startGateway, until, type TestGateway } from "./helpers.js";

let gw: TestGateway;
let client: GatewayClient;

beforeAll(async () => {
  gw = await startGateway();
  client = new GatewayClient(gw.base);
});

afterAll(async () => {
  await gw.stop();
});

class CountingClient extends GatewayClient {
  saveCalls = 0;

  override saveLocation(name: string, description: string): Promise<Location> {
    this.saveCalls += 1;
    return super.saveLocation(name, description);
  }
}

function poseText(root: HTMLElement, axis: "x" | "y" | "theta"): string {
  return root.querySelector(`.pose-${axis}`)!.textContent ?? "";
}

describe("control page", () => {
  it("teleop press moves the displayed pose by exactly one teleop step", async () => {
    const root = freshRoot();
    const page = new ControlPage(root, client);
    await page.load();
    expect(poseText(root, "x")).toBe("0.00");

    root.querySelector<HTMLButtonElement>('.teleop-btn[data-direction="forward"]')!.click();
    await until(() => poseText(root, "x") === "0.05", "x to advance one step");

    // displayed value is the gateway's, not a client-side integration
    const status = await getJson<RobotStatus>(gw.base, "/api/robot/status");
    expect(status.pose.x.toFixed(2)).toBe("0.05");
    expect(poseText(root, "y")).toBe(status.pose.y.toFixed(2));

    root.querySelector<HTMLButtonElement>('.teleop-btn[data-direction="forward"]')!.click();
    await until(() => poseText(root, "x") === "0.10", "second step");

    root.querySelector<HTMLButtonElement>('.teleop-btn[data-direction="rotate_left"]')!.click();
    await until(() => poseText(root, "theta") === "0.10", "one turn step");
    const after = await getJson<RobotStatus>(gw.base, "/api/robot/status");
    expect(after.pose.theta.toFixed(2)).toBe("0.10");
  });

  it("keeps the readout equal to the gateway pose across mixed presses", async () => {
    const root = freshRoot();
    const page = new ControlPage(root, client);
    await page.load();

    for (const dir of ["back", "rotate_right", "forward", "forward"]) {
      const before = await getJson<RobotStatus>(gw.base, "/api/robot/status");
      root.querySelector<HTMLButtonElement>(`.teleop-btn[data-direction="${dir}"]`)!.click();
      await until(async () => {
        const now = await getJson<RobotStatus>(gw.base, "/api/robot/status");
        return (
          JSON.stringify(now.pose) !== JSON.stringify(before.pose) &&
          poseText(root, "x") === now.pose.x.toFixed(2) &&
          poseText(root, "y") === now.pose.y.toFixed(2) &&
          poseText(root, "theta") === now.pose.theta.toFixed(2)
        );
      }, `readout to match after ${dir}`);
    }
  });

  it("streams live pose frames while the robot navigates", async () => {
    const root = freshRoot();
    const page = new ControlPage(root, client);
    await page.load();

    const events = new EventSocket(gw.wsUrl, NodeWebSocket as unknown as SocketCtor);
    events.on("/robot/pose", (msg) => page.updatePose(msg as { x: number; y: number; theta: number }));
    events.connect();
    try {
      const start = await client.robotStatus();
      const goal = { x: start.pose.x + 1.0, y: start.pose.y, theta: start.pose.theta };
      await client.goto(goal);
      await until(async () => (await client.robotStatus()).mode === "idle", "robot to settle");

      // frames alone must carry the readout to wherever the robot stopped
      const settled = await getJson<RobotStatus>(gw.base, "/api/robot/status");
      await until(
        () =>
          poseText(root, "x") === settled.pose.x.toFixed(2) &&
          poseText(root, "y") === settled.pose.y.toFixed(2),
        "live readout to mirror the settled pose",
      );
      expect(settled.pose.x).toBeGreaterThan(start.pose.x + 0.8);
    } finally {
      events.close();
    }
  });

  it("surfaces a busy conflict when teleoping mid-navigation", async () => {
    const root = freshRoot();
    const page = new ControlPage(root, client);
    await page.load();

    const status = await client.robotStatus();
    await client.goto({ x: status.pose.x - 3.0, y: status.pose.y, theta: status.pose.theta });
    root.querySelector<HTMLButtonElement>('.teleop-btn[data-direction="forward"]')!.click();
    await until(() => {
      const notice = root.querySelector<HTMLElement>(".notice");
      return !notice?.hidden && (notice?.textContent ?? "").includes("busy");
    }, "busy notice");
    await until(async () => (await client.robotStatus()).mode === "idle", "navigation to finish");
  });

  it("saves the current spot as a named location", async () => {
    const root = freshRoot();
    const page = new ControlPage(root, client);
    await page.load();

    root.querySelector<HTMLInputElement>(".loc-name")!.value = "Checkpoint A";
    root.querySelector<HTMLTextAreaElement>(".loc-desc")!.value = "halfway marker";
    root
      .querySelector<HTMLFormElement>(".save-location")!
      .dispatchEvent(new Event("submit", { cancelable: true }));
    await until(
      () => (root.querySelector(".notice")?.textContent ?? "").includes('Saved "Checkpoint A"'),
      "save notice",
    );

    const status = await getJson<RobotStatus>(gw.base, "/api/robot/status");
    const locations = await getJson<Location[]>(gw.base, "/api/locations");
    const saved = locations.find((l) => l.name === "Checkpoint A");
    expect(saved).toBeDefined();
    expect(saved!.description).toBe("halfway marker");
    expect(saved!.pose).toEqual(status.pose);
  });

  it("rejects a blank location name locally, without any request", async () => {
    const root = freshRoot();
    const counting = new CountingClient(gw.base);
    const page = new ControlPage(root, counting);
    await page.load();

    root.querySelector<HTMLInputElement>(".loc-name")!.value = "   ";
    root
      .querySelector<HTMLFormElement>(".save-location")!
      .dispatchEvent(new Event("submit", { cancelable: true }));
    await until(() => !root.querySelector<HTMLElement>(".loc-error")!.hidden, "field error");
    expect(root.querySelector(".loc-error")!.textContent).toContain("name is required");
    expect(counting.saveCalls).toBe(0);
  });

  it("keeps the form on a name conflict so one field fixes it", async () => {
    const root = freshRoot();
    const page = new ControlPage(root, client);
    await page.load();

    const before = (await getJson<Location[]>(gw.base, "/api/locations")).length;
    root.querySelector<HTMLInputElement>(".loc-name")!.value = "Checkpoint A";
    root.querySelector<HTMLTextAreaElement>(".loc-desc")!.value = "same name again";
    root
      .querySelector<HTMLFormElement>(".save-location")!
      .dispatchEvent(new Event("submit", { cancelable: true }));
    await until(() => !root.querySelector<HTMLElement>(".loc-error")!.hidden, "conflict error");

    expect(root.querySelector(".loc-error")!.textContent).toContain("already in use");
    expect(root.querySelector<HTMLInputElement>(".loc-name")!.value).toBe("Checkpoint A");
    expect(root.querySelector<HTMLTextAreaElement>(".loc-desc")!.value).toBe("same name again");
    const after = (await getJson<Location[]>(gw.base, "/api/locations")).length;
    expect(after).toBe(before);
  });

  it("disables the controls when the gateway is unreachable", async () => {
    const root = freshRoot();
    const dead = new GatewayClient("http://127.0.0.1:9");
    const page = new ControlPage(root, dead);
    await page.load();

    expect(root.querySelector(".notice")!.textContent).toContain("unreachable");
    for (const btn of root.querySelectorAll<HTMLButtonElement>(".teleop-btn")) {
      expect(btn.disabled).toBe(true);
    }
    expect(root.querySelector<HTMLButtonElement>(".loc-save")!.disabled).toBe(true);
  });
});
