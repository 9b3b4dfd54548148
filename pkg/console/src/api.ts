import type {
  Location,
  MonthlyStats,
  Pose,
  Recommendation,
  RobotStatus,
  SearchResults,
  TeleopDirection,
  Tour,
  TourRun,
  TourStats,
  TypeStats,
} from "./types.js";

/** Error payloads from the gateway are flat {code, message, detail?}. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail?: unknown,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Thrown when the gateway cannot be reached at all (status 0). */
export function isOffline(err: unknown): boolean {
  return err instanceof ApiError && err.status === 0;
}

export interface RecommendParams {
  type?: string;
  maxDuration?: number;
  k?: number;
  months?: number;
}

export class GatewayClient {
  constructor(readonly base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let res: Response;
    try {
      res = await fetch(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch {
      throw new ApiError(0, "unreachable", "gateway unreachable");
    }
    if (!res.ok) {
      let code = "error";
      let message = `${res.status} ${res.statusText}`;
      let detail: unknown;
      try {
        const payload = await res.json();
        if (payload && typeof payload === "object") {
          code = payload.code ?? code;
          message = payload.message ?? message;
          detail = payload.detail;
        }
      } catch {
        // non-JSON error body: keep the status line
      }
      throw new ApiError(res.status, code, message, detail);
    }
    return res.json() as Promise<T>;
  }

  // -- tours ---------------------------------------------------------------

  listTours(): Promise<Tour[]> {
    return this.request("GET", "/api/tours");
  }

  getTour(id: string): Promise<Tour> {
    return this.request("GET", `/api/tours/${encodeURIComponent(id)}`);
  }

  createTour(args: {
    name: string;
    tour_type: string;
    stop_location_ids: string[];
    expected_duration: number;
  }): Promise<Tour> {
    return this.request("POST", "/api/tours", args);
  }

  editTour(id: string, patch: Record<string, unknown>): Promise<Tour> {
    return this.request("PATCH", `/api/tours/${encodeURIComponent(id)}`, patch);
  }

  deleteTour(id: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/api/tours/${encodeURIComponent(id)}`);
  }

  copyTour(id: string, newName?: string): Promise<Tour> {
    return this.request("POST", `/api/tours/${encodeURIComponent(id)}/copy`, {
      new_name: newName ?? null,
    });
  }

  executeTour(id: string): Promise<{ run_id: string }> {
    return this.request("POST", `/api/tours/${encodeURIComponent(id)}/execute`);
  }

  abortExecution(): Promise<TourRun> {
    return this.request("POST", "/api/execution/abort");
  }

  // -- locations -------------------------------------------------------------

  listLocations(): Promise<Location[]> {
    return this.request("GET", "/api/locations");
  }

  /** Saves the robot's current pose under a name. */
  saveLocation(name: string, description: string): Promise<Location> {
    return this.request("POST", "/api/locations", { name, description });
  }

  editLocation(id: string, patch: Record<string, unknown>): Promise<Location> {
    return this.request("PATCH", `/api/locations/${encodeURIComponent(id)}`, patch);
  }

  deleteLocation(id: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/api/locations/${encodeURIComponent(id)}`);
  }

  // -- robot -----------------------------------------------------------------

  robotStatus(): Promise<RobotStatus> {
    return this.request("GET", "/api/robot/status");
  }

  teleop(direction: TeleopDirection): Promise<RobotStatus> {
    return this.request("POST", "/api/robot/teleop", { direction });
  }

  goto(pose: Pose): Promise<RobotStatus> {
    return this.request("POST", "/api/robot/goto", pose);
  }

  // -- search, stats, recommendations -----------------------------------------

  search(q: string): Promise<SearchResults> {
    return this.request("GET", `/api/search?q=${encodeURIComponent(q)}`);
  }

  statsMonthly(months?: number): Promise<MonthlyStats> {
    const suffix = months === undefined ? "" : `?months=${months}`;
    return this.request("GET", `/api/stats/monthly${suffix}`);
  }

  statsTypes(months?: number): Promise<TypeStats> {
    const suffix = months === undefined ? "" : `?months=${months}`;
    return this.request("GET", `/api/stats/types${suffix}`);
  }

  statsTour(id: string): Promise<TourStats> {
    return this.request("GET", `/api/stats/tours/${encodeURIComponent(id)}`);
  }

  recommendations(params?: RecommendParams): Promise<Recommendation[]> {
    const query = new URLSearchParams();
    if (params?.type !== undefined) query.set("type", params.type);
    if (params?.maxDuration !== undefined) query.set("max_duration", String(params.maxDuration));
    if (params?.k !== undefined) query.set("k", String(params.k));
    if (params?.months !== undefined) query.set("months", String(params.months));
    const qs = query.toString();
    return this.request("GET", `/api/recommendations${qs ? "?" + qs : ""}`);
  }
}
