// Wire shapes as the gateway serves them. Field names match the JSON exactly.

export interface Pose {
  x: number;
  y: number;
  theta: number;
}

export interface Location {
  id: string;
  name: string;
  pose: Pose;
  description: string;
  created_at: string;
}

export interface TourStop {
  location_id: string;
  speech_override: string | null;
}

export interface Tour {
  id: string;
  name: string;
  tour_type: string;
  stops: TourStop[];
  expected_duration: number; // seconds
  created_at: string;
  updated_at: string;
}

export type RobotMode = "idle" | "navigating" | "speaking";

export interface RobotStatus {
  pose: Pose;
  mode: RobotMode;
  goal: Pose | null;
  active_tour: string | null;
}

export interface TourRun {
  run_id: string;
  tour_id: string;
  started_at: string;
  ended_at: string;
  outcome: "completed" | "aborted" | "failed";
  stops_visited: number;
}

export interface MonthBucket {
  month: string; // "YYYY-MM"
  run_count: number;
}

export interface MonthlyStats {
  months: MonthBucket[];
  total: number;
}

export interface TypeStats {
  counts: Record<string, number>;
  total: number;
}

export interface TourStats {
  tour_id: string;
  total_runs: number;
  completed: number;
  aborted: number;
  failed: number;
  mean_duration_seconds: number | null;
  last_run_at: string | null;
}

export interface Recommendation {
  tour: Tour;
  run_count: number;
}

export interface SearchResults {
  tours: Tour[];
  locations: Location[];
}

export interface ProgressMsg {
  run_id: string;
  tour_id: string;
  stop_index: number;
  phase: string;
}

export interface EventFrame {
  topic: string;
  msg: unknown;
}

export type TeleopDirection = "forward" | "back" | "rotate_left" | "rotate_right";
