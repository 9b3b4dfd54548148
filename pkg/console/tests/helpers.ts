import { spawn, spawnSync } from "node:child_process";
import { mkdtemp, rm } from "node:fs/promises";
import { createServer, type AddressInfo } from "node:net";
import { tmpdir } from "node:os";
import path from "node:path";

export interface TestGateway {
  base: string;
  wsUrl: string;
  store: string;
  stop(): Promise<void>;
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Polls until fn returns a truthy value; throws with the label on timeout. */
export async function until<T>(fn: () => T | Promise<T>, label = "condition", timeoutMs = 15000): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = await fn();
    if (value) return value;
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${label}`);
    await sleep(15);
  }
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.on("error", reject);
    srv.listen(0, "127.0.0.1", () => {
      const port = (srv.address() as AddressInfo).port;
      srv.close(() => resolve(port));
    });
  });
}

/**
 * Seeds a demo store in a temp dir and serves it with a real gateway
 * subprocess. Each test file gets its own instance, so tests can mutate
 * tours and drive the robot without stepping on other files.
 */
export async function startGateway(): Promise<TestGateway> {
  const dir = await mkdtemp(path.join(tmpdir(), "console-test-"));
  const store = path.join(dir, "store.json");

  const seeded = spawnSync("python3", ["-m", "tourbot", "seed", "--store", store], {
    encoding: "utf8",
  });
  if (seeded.status !== 0) {
    throw new Error(`seed failed: ${seeded.stderr || seeded.stdout}`);
  }

  const httpPort = await freePort();
  const bridgePort = await freePort();
  const proc = spawn(
    "python3",
    [
      "-m",
      "tourbot",
      "serve",
      "--store",
      store,
      "--http-port",
      String(httpPort),
      "--bridge-port",
      String(bridgePort),
      "--time-scale",
      "20",
    ],
    {
      stdio: ["ignore", "pipe", "pipe"],
      // the DOM test environment enforces browser CORS on fetch
      env: { ...process.env, TOURBOT_CORS_ORIGINS: "*" },
    },
  );
  let logs = "";
  proc.stdout?.on("data", (chunk) => (logs += chunk));
  proc.stderr?.on("data", (chunk) => (logs += chunk));

  const base = `http://127.0.0.1:${httpPort}`;
  const deadline = Date.now() + 30000;
  for (;;) {
    if (proc.exitCode !== null) throw new Error(`serve exited early:\n${logs}`);
    try {
      const res = await fetch(`${base}/api/robot/status`);
      if (res.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      proc.kill("SIGKILL");
      throw new Error(`gateway did not come up:\n${logs}`);
    }
    await sleep(100);
  }

  const stop = () =>
    new Promise<void>((resolve) => {
      const killTimer = setTimeout(() => proc.kill("SIGKILL"), 5000);
      proc.once("exit", () => {
        clearTimeout(killTimer);
        void rm(dir, { recursive: true, force: true }).then(resolve, () => resolve());
      });
      proc.kill("SIGINT");
    });

  return { base, wsUrl: `ws://127.0.0.1:${httpPort}/api/events`, store, stop };
}

/** Fresh container element for a page under test. */
export function freshRoot(): HTMLElement {
  document.body.innerHTML = `<div id="test-root"></div>`;
  return document.getElementById("test-root")!;
}

/** GET an endpoint as parsed JSON, bypassing the client under test. */
export async function getJson<T>(base: string, pathname: string): Promise<T> {
  const res = await fetch(base + pathname);
  if (!res.ok) throw new Error(`${pathname} -> ${res.status}`);
  return res.json() as Promise<T>;
}
