import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiError } from "../src/api.js";
import { errorBanner, groupFindings, initialState, locusTarget, sessionCreated, turnCompleted, turnFailed, turnStarted, } from "../src/model.js";
const GRAPH = {
    directed: false,
    nodes: [
        { id: "UNO", label: "UNO arduino uno" },
        { id: "LED1", label: "LED1 led" },
    ],
    edges: [
        { source: "UNO", target: "LED1", from_pin: "D13", to_pin: "anode", label: "D13 - anode" },
    ],
};
const ERC = {
    findings: [
        { rule_id: "E-POWER", severity: "error", message: "m", locus: "part:LED1" },
        { rule_id: "W-PULLUP", severity: "warning", message: "m", locus: "pin:UNO.D2" },
    ],
    rules_run: ["E-POWER", "W-PULLUP"],
    clean: false,
};
test("session creation resets everything but the draft", () => {
    const state = { ...initialState, draft: "keep me", spec: {} };
    const next = sessionCreated(state, "sid");
    assert.equal(next.sessionId, "sid");
    assert.equal(next.draft, "keep me");
    assert.equal(next.spec, null);
});
test("turn lifecycle updates busy, spec, and history", () => {
    const turn = {
        session: "sid", turn: 1, user_text: "t", iterations: 2,
        termination: "stop_token", spec: null, erc: ERC, warnings: [],
    };
    let state = turnStarted({ ...initialState, sessionId: "sid" });
    assert.equal(state.busy, true);
    state = turnCompleted(state, turn, GRAPH, [
        { turn: 1, user_text: "t", iterations: 2, termination: "stop_token", erc_errors: 1, erc_warnings: 1 },
    ]);
    assert.equal(state.busy, false);
    assert.equal(state.graph, GRAPH);
    assert.equal(state.history.length, 1);
});
test("groupFindings splits by severity", () => {
    const { errors, warnings } = groupFindings(ERC);
    assert.deepEqual(errors.map((f) => f.rule_id), ["E-POWER"]);
    assert.deepEqual(warnings.map((f) => f.rule_id), ["W-PULLUP"]);
    assert.deepEqual(groupFindings(null), { errors: [], warnings: [] });
});
test("locusTarget maps pin and part loci to exactly one node", () => {
    assert.equal(locusTarget("pin:UNO.D2", GRAPH), "UNO");
    assert.equal(locusTarget("part:LED1", GRAPH), "LED1");
    assert.equal(locusTarget("pin:GHOST.1", GRAPH), null);
    assert.equal(locusTarget("code:line 3", GRAPH), null);
    assert.equal(locusTarget("spec", GRAPH), null);
    assert.equal(locusTarget("pin:UNO.D2", null), null);
});
test("every finding with a pin or part locus resolves to one node", () => {
    for (const finding of ERC.findings) {
        const target = locusTarget(finding.locus, GRAPH);
        assert.ok(target === null || GRAPH.nodes.filter((n) => n.id === target).length === 1);
    }
});
test("error banners distinguish provider, parse, and busy failures", () => {
    const provider = errorBanner(new ApiError(502, { error: "ReplayMiss", message: "no entry" }));
    assert.equal(provider.kind, "provider");
    assert.match(provider.message, /no entry/);
    const parse = errorBanner(new ApiError(422, { error: "parse_failure", message: "m", diagnostics: [1, 2] }));
    assert.equal(parse.kind, "parse");
    assert.match(parse.message, /2 diagnostics/);
    const busy = errorBanner(new ApiError(409, "busy"));
    assert.equal(busy.kind, "busy");
    assert.equal(errorBanner(new Error("boom")).kind, "info");
});
test("turnFailed stores the banner and clears busy", () => {
    const state = turnFailed(turnStarted(initialState), new ApiError(502, { message: "x" }));
    assert.equal(state.busy, false);
    assert.equal(state.banner?.kind, "provider");
});
