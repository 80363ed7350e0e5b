import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiError, StudioClient } from "../src/api.js";
function jsonResponse(payload, status = 200) {
    return new Response(JSON.stringify(payload), {
        status,
        headers: { "Content-Type": "application/json" },
    });
}
function clientWith(handler) {
    return new StudioClient("http://test", async (url, init) => handler(url, init));
}
test("createSession posts provider and returns id", async () => {
    const calls = [];
    const client = clientWith((url, init) => {
        calls.push({ url, body: JSON.parse(String(init?.body ?? "{}")) });
        return jsonResponse({ id: "abc123", provider: "replay" }, 201);
    });
    const created = await client.createSession("replay");
    assert.equal(created.id, "abc123");
    assert.deepEqual(calls[0], { url: "http://test/sessions", body: { provider: "replay" } });
});
test("generate returns the turn summary", async () => {
    const summary = {
        session: "s",
        turn: 1,
        user_text: "blink",
        iterations: 2,
        termination: "stop_token",
        spec: null,
        erc: { findings: [], rules_run: [], clean: true },
        warnings: [],
    };
    const client = clientWith(() => jsonResponse(summary));
    const turn = await client.generate("s", "blink");
    assert.equal(turn.termination, "stop_token");
    assert.equal(turn.erc?.clean, true);
});
test("busy session surfaces as ApiError 409", async () => {
    const client = clientWith(() => jsonResponse({ detail: "a turn is already in flight" }, 409));
    await assert.rejects(() => client.generate("s", "x"), (error) => error instanceof ApiError && error.status === 409);
});
test("parse failure carries the detail payload", async () => {
    const detail = { error: "parse_failure", message: "nope", diagnostics: [] };
    const client = clientWith(() => jsonResponse({ detail }, 422));
    try {
        await client.generate("s", "x");
        assert.fail("expected ApiError");
    }
    catch (error) {
        assert.ok(error instanceof ApiError);
        assert.equal(error.status, 422);
        assert.deepEqual(error.detail, detail);
    }
});
test("provider failure maps to 502 ApiError", async () => {
    const client = clientWith(() => jsonResponse({ detail: { error: "ReplayMiss", message: "no transcript entry" } }, 502));
    await assert.rejects(() => client.refine("s", "x"), (error) => error instanceof ApiError && error.status === 502);
});
test("getExport returns raw text", async () => {
    const client = clientWith((url) => {
        assert.ok(url.endsWith("/sessions/s/export?format=flat"));
        return new Response("# flat netlist: 0 nets\n", { status: 200 });
    });
    assert.equal(await client.getExport("s", "flat"), "# flat netlist: 0 nets\n");
});
