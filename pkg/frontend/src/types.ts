// Wire types mirroring the HTTP API. The console never computes business
// values from these; it only renders what the server sends.

export interface GridlockEntry {
  congress: number;
  score: number;
  gridlocked_clusters: number;
  total_clusters: number;
  run_id: string;
}

export interface BillRow {
  bill_id: string;
  title: string;
  summary: string;
  bill_type: string;
  bill_number: string;
  score: number;
  enacted: boolean;
  status: string;
}

export interface ClusterReport {
  cluster_name: string;
  query: string;
  threshold: number;
  total_bills_found: number;
  enacted_bills: number;
  has_enacted_legislation: boolean;
  enactment_rate: number;
  bills: BillRow[];
  included?: Record<string, boolean>;
}

export interface GridlockResult {
  congress: number;
  gridlocked_clusters: number;
  total_clusters: number;
  score: number;
  run_id: string;
  trace_ref: string;
}

export interface RunDoc {
  run_id: string;
  congress: number;
  state: string;
  cluster_reports: ClusterReport[];
  result: GridlockResult | null;
  warnings: string[];
}

export interface PatchResponse {
  cluster_report: ClusterReport;
  gridlock: GridlockResult;
}

export interface ToolCallPair {
  call: { call_id: string; tool_name: string; arguments: Record<string, unknown> };
  result: { call_id: string; outcome: string; payload: unknown };
}

export interface TurnOutcome {
  kind: "answered" | "iteration_limit" | "provider_error";
  final_text: string;
  iterations_used: number;
  tool_calls_made: ToolCallPair[];
}

export interface TraceEvent {
  v: number;
  seq: number;
  timestamp: string;
  scope_id: string;
  kind: string;
  payload: Record<string, unknown>;
  latency_ms?: number;
}
