/**
 * View-model state and pure transition functions.
 *
 * The state always mirrors the server's latest responses; nothing here
 * mutates spec data. Keeping transitions pure makes them directly
 * testable in node without a DOM.
 */
import { ApiError } from "./api.js";
export const initialState = {
    sessionId: null,
    draft: "",
    refineDraft: "",
    busy: false,
    spec: null,
    erc: null,
    graph: null,
    history: [],
    banner: null,
    selectedLocus: null,
};
export function sessionCreated(state, sessionId) {
    return { ...initialState, draft: state.draft, sessionId };
}
export function turnStarted(state) {
    return { ...state, busy: true, banner: null };
}
export function turnCompleted(state, turn, graph, history) {
    return {
        ...state,
        busy: false,
        spec: turn.spec,
        erc: turn.erc,
        graph,
        history,
        refineDraft: "",
        banner: null,
        selectedLocus: null,
    };
}
export function turnFailed(state, error) {
    return { ...state, busy: false, banner: errorBanner(error) };
}
export function draftChanged(state, draft) {
    return { ...state, draft };
}
export function refineDraftChanged(state, refineDraft) {
    return { ...state, refineDraft };
}
export function locusSelected(state, locus) {
    return { ...state, selectedLocus: locus };
}
/** Actionable banner text for a failed request. */
export function errorBanner(error) {
    if (error instanceof ApiError) {
        if (error.status === 502) {
            const detail = error.detail;
            return {
                kind: "provider",
                message: `Provider failure: ${detail?.message ?? "the completion backend did not answer"}. Check the provider configuration and retry.`,
            };
        }
        if (error.status === 422) {
            const detail = error.detail;
            const count = Array.isArray(detail?.diagnostics) ? detail.diagnostics.length : 0;
            return {
                kind: "parse",
                message: `The model response could not be parsed (${detail?.message ?? "unknown"}; ${count} diagnostics). Rephrase the description or try again.`,
            };
        }
        if (error.status === 409) {
            return { kind: "busy", message: "A turn is already running for this session; wait for it to finish." };
        }
        return { kind: "info", message: `Request failed with status ${error.status}.` };
    }
    return { kind: "info", message: `Request failed: ${String(error)}` };
}
export function groupFindings(erc) {
    const errors = [];
    const warnings = [];
    for (const finding of erc?.findings ?? []) {
        (finding.severity === "error" ? errors : warnings).push(finding);
    }
    return { errors, warnings };
}
/**
 * Map a finding locus to the graph node it highlights.
 *
 * Pin loci ("pin:UNO.D2") and part loci ("part:SERVO1") resolve to the
 * owning part's node, which is unique per ref; code and whole-spec loci
 * have no graph element.
 */
export function locusTarget(locus, graph) {
    if (graph === null)
        return null;
    let ref = null;
    if (locus.startsWith("pin:")) {
        const endpoint = locus.slice(4);
        const dot = endpoint.indexOf(".");
        ref = dot === -1 ? endpoint : endpoint.slice(0, dot);
    }
    else if (locus.startsWith("part:")) {
        ref = locus.slice(5);
    }
    if (ref === null)
        return null;
    return graph.nodes.some((n) => n.id === ref) ? ref : null;
}
/** Stable name for a downloaded device document. */
export function exportFileName(kind) {
    return kind === "device" ? "design.device.json" : "design.netlist.txt";
}
