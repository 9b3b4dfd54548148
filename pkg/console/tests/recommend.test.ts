import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import { RecommendPage } from "../src/pages/recommend.js";
import type { Recommendation, RobotStatus } from "../src/types.js";
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

interface Row {
  name: string;
  count: number;
}

function rows(root: HTMLElement): Row[] {
  return [...root.querySelectorAll<HTMLElement>(".recommend-row")].map((li) => ({
    name: li.querySelector(".rec-name")!.textContent ?? "",
    count: Number((li.querySelector(".rec-count")!.textContent ?? "").split(" ")[0]),
  }));
}

function submitForm(root: HTMLElement, values: { type?: string; duration?: string; k?: string }): void {
  root.querySelector<HTMLInputElement>(".rec-type")!.value = values.type ?? "";
  root.querySelector<HTMLInputElement>(".rec-duration")!.value = values.duration ?? "";
  root.querySelector<HTMLInputElement>(".rec-k")!.value = values.k ?? "";
  root
    .querySelector<HTMLFormElement>(".recommend-form")!
    .dispatchEvent(new Event("submit", { cancelable: true }));
}

describe("recommendations page", () => {
  it("default list order and counts equal the recommendations endpoint", async () => {
    const root = freshRoot();
    const page = new RecommendPage(root, client);
    await page.load();

    const expected = await getJson<Recommendation[]>(gw.base, "/api/recommendations");
    expect(expected.length).toBeGreaterThan(0);
    expect(rows(root)).toEqual(
      expected.map((r) => ({ name: r.tour.name, count: r.run_count })),
    );
  });

  it("parameterized queries render exactly what the endpoint ranks", async () => {
    const root = freshRoot();
    const page = new RecommendPage(root, client);
    await page.load();

    submitForm(root, { type: "exhibition", k: "2" });
    const expected = await getJson<Recommendation[]>(
      gw.base,
      "/api/recommendations?type=exhibition&k=2",
    );
    await until(() => {
      const rendered = rows(root);
      return (
        rendered.length === expected.length &&
        rendered.every(
          (r, i) => r.name === expected[i].tour.name && r.count === expected[i].run_count,
        )
      );
    }, "filtered ranking to render");
    expect(expected.every((r) => r.tour.tour_type === "exhibition")).toBe(true);
  });

  it("duration filters narrow the list the same way the endpoint does", async () => {
    const root = freshRoot();
    const page = new RecommendPage(root, client);
    await page.load();

    submitForm(root, { duration: "12" });
    const expected = await getJson<Recommendation[]>(gw.base, "/api/recommendations?max_duration=12");
    await until(
      () => rows(root).length === expected.length,
      "duration-filtered list to render",
    );
    expect(rows(root).map((r) => r.name)).toEqual(expected.map((r) => r.tour.name));
  });

  it("shows an explicit empty state when nothing qualifies", async () => {
    const root = freshRoot();
    const page = new RecommendPage(root, client);
    await page.load();

    submitForm(root, { duration: "1" });
    await until(() => root.querySelector(".recommend-list .empty"), "empty state");
    expect(root.querySelector(".recommend-list .empty")!.textContent).toContain("No tours match");
    expect(rows(root)).toEqual([]);

    const expected = await getJson<Recommendation[]>(gw.base, "/api/recommendations?max_duration=1");
    expect(expected).toEqual([]);
  });

  it("reset returns to the popularity ranking", async () => {
    const root = freshRoot();
    const page = new RecommendPage(root, client);
    await page.load();

    submitForm(root, { k: "1" });
    await until(() => rows(root).length === 1, "top-1 list");
    root.querySelector<HTMLButtonElement>(".rec-reset")!.click();

    const popular = await getJson<Recommendation[]>(gw.base, "/api/recommendations");
    await until(() => rows(root).length === popular.length, "full ranking back");
    expect(rows(root).map((r) => r.name)).toEqual(popular.map((r) => r.tour.name));
  });

  it("execute starts the recommended tour on the robot", async () => {
    const root = freshRoot();
    const page = new RecommendPage(root, client);
    await page.load();

    const expected = await getJson<Recommendation[]>(gw.base, "/api/recommendations");
    const top = expected[0];
    root.querySelector<HTMLButtonElement>(".recommend-row .rec-execute")!.click();
    await until(async () => {
      const status = await getJson<RobotStatus>(gw.base, "/api/robot/status");
      return status.active_tour === top.tour.id;
    }, "robot to pick up the tour");

    await client.abortExecution();
    await until(
      async () => (await getJson<RobotStatus>(gw.base, "/api/robot/status")).mode === "idle",
      "robot to go idle",
    );
  });
});
