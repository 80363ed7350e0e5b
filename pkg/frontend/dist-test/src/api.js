/**
 * Typed client for the circuitsmith design service.
 *
 * Every call goes over the HTTP API; the studio never computes nets or
 * verdicts itself. Server failures surface as ApiError with the HTTP
 * status and the response's detail payload, so the UI can distinguish a
 * provider failure (502) from a parse failure with diagnostics (422) and
 * a busy session (409).
 */
export class ApiError extends Error {
    status;
    detail;
    constructor(status, detail) {
        super(`service responded ${status}`);
        this.status = status;
        this.detail = detail;
    }
}
export class StudioClient {
    baseUrl;
    fetchFn;
    constructor(baseUrl = "", fetchFn = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
        if (!response.ok) {
            let detail = null;
            try {
                detail = (await response.json());
            }
            catch {
                detail = await response.text().catch(() => null);
            }
            const body = detail;
            throw new ApiError(response.status, body?.detail ?? detail);
        }
        return response;
    }
    async json(path, init) {
        const response = await this.request(path, init);
        return (await response.json());
    }
    post(path, body) {
        return this.json(path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
    }
    async health() {
        try {
            await this.request("/healthz");
            return true;
        }
        catch {
            return false;
        }
    }
    createSession(provider) {
        return this.post("/sessions", provider ? { provider } : {});
    }
    generate(sessionId, description) {
        return this.post(`/sessions/${sessionId}/generate`, { description });
    }
    refine(sessionId, text) {
        return this.post(`/sessions/${sessionId}/refine`, { text });
    }
    getSpec(sessionId) {
        return this.json(`/sessions/${sessionId}/spec`);
    }
    getErc(sessionId) {
        return this.json(`/sessions/${sessionId}/erc`);
    }
    async getExport(sessionId, format) {
        const response = await this.request(`/sessions/${sessionId}/export?format=${format}`);
        return response.text();
    }
    async getGraph(sessionId) {
        return JSON.parse(await this.getExport(sessionId, "graph"));
    }
    getHistory(sessionId) {
        return this.json(`/sessions/${sessionId}/history`);
    }
}
