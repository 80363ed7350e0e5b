/**
 * Typed client for the circuitsmith design service.
 *
 * Every call goes over the HTTP API; the studio never computes nets or
 * verdicts itself. Server failures surface as ApiError with the HTTP
 * status and the response's detail payload, so the UI can distinguish a
 * provider failure (502) from a parse failure with diagnostics (422) and
 * a busy session (409).
 */

export interface BomRow {
  ref: string;
  part_type: string;
  value?: string;
  note?: string;
}

export interface PinoutRow {
  pin: string;
  note?: string;
}

export interface ConnectionRow {
  from: string;
  to: string;
  note?: string;
}

export interface CodeSection {
  language_tag: string;
  source: string;
  note?: string;
}

export interface DeviceDocument {
  description: string;
  bill_of_materials: BomRow[];
  pinouts: Record<string, PinoutRow[]>;
  schematic: ConnectionRow[];
  code: CodeSection | null;
  provenance: {
    model_id: string;
    prompt_digest: string;
    reflection_iterations: number;
    created_at: string;
  } | null;
}

export interface Finding {
  rule_id: string;
  severity: "error" | "warning";
  message: string;
  locus: string;
}

export interface ErcReport {
  findings: Finding[];
  rules_run: string[];
  clean: boolean;
}

export interface TurnSummary {
  session: string;
  turn: number;
  user_text: string;
  iterations: number;
  termination: string;
  spec: DeviceDocument | null;
  erc: ErcReport | null;
  warnings: string[];
}

export interface GraphEdge {
  source: string;
  target: string;
  from_pin: string;
  to_pin: string;
  label: string;
  note?: string;
}

export interface GraphDoc {
  directed: boolean;
  nodes: { id: string; label: string }[];
  edges: GraphEdge[];
}

export interface HistoryEntry {
  turn: number;
  user_text: string;
  iterations: number;
  termination: string;
  erc_errors: number;
  erc_warnings: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`service responded ${status}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class StudioClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail: unknown = null;
      try {
        detail = (await response.json()) as { detail?: unknown };
      } catch {
        detail = await response.text().catch(() => null);
      }
      const body = detail as { detail?: unknown } | null;
      throw new ApiError(response.status, body?.detail ?? detail);
    }
    return response;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.request(path, init);
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async health(): Promise<boolean> {
    try {
      await this.request("/healthz");
      return true;
    } catch {
      return false;
    }
  }

  createSession(provider?: string): Promise<{ id: string; provider: string }> {
    return this.post("/sessions", provider ? { provider } : {});
  }

  generate(sessionId: string, description: string): Promise<TurnSummary> {
    return this.post(`/sessions/${sessionId}/generate`, { description });
  }

  refine(sessionId: string, text: string): Promise<TurnSummary> {
    return this.post(`/sessions/${sessionId}/refine`, { text });
  }

  getSpec(sessionId: string): Promise<DeviceDocument> {
    return this.json(`/sessions/${sessionId}/spec`);
  }

  getErc(sessionId: string): Promise<ErcReport> {
    return this.json(`/sessions/${sessionId}/erc`);
  }

  async getExport(sessionId: string, format: "flat" | "graph"): Promise<string> {
    const response = await this.request(`/sessions/${sessionId}/export?format=${format}`);
    return response.text();
  }

  async getGraph(sessionId: string): Promise<GraphDoc> {
    return JSON.parse(await this.getExport(sessionId, "graph")) as GraphDoc;
  }

  getHistory(sessionId: string): Promise<{ session: string; turns: HistoryEntry[] }> {
    return this.json(`/sessions/${sessionId}/history`);
  }
}
