/** Application entry point: state loop wiring the client to the renderer. */
import { StudioClient } from "./api.js";
import { draftChanged, errorBanner, exportFileName, initialState, locusSelected, refineDraftChanged, sessionCreated, turnCompleted, turnFailed, turnStarted, } from "./model.js";
import { render } from "./ui.js";
const client = new StudioClient("");
const root = document.getElementById("app");
if (root === null)
    throw new Error("missing #app mount point");
let state = initialState;
function update(next) {
    state = next;
    render(root, state, actions);
}
function download(name, text, type) {
    const blob = new Blob([text], { type });
    const url = URL.createObjectURL(blob);
    const anchor = document.createElement("a");
    anchor.href = url;
    anchor.download = name;
    anchor.click();
    setTimeout(() => URL.revokeObjectURL(url), 1000);
}
async function completeTurn(sessionId, turnPromise) {
    update(turnStarted(state));
    try {
        const turn = await turnPromise;
        const [graph, history] = await Promise.all([
            client.getGraph(sessionId),
            client.getHistory(sessionId),
        ]);
        update(turnCompleted(state, turn, graph, history.turns));
    }
    catch (error) {
        update(turnFailed(state, error));
    }
}
const actions = {
    newSession() {
        client
            .createSession()
            .then((created) => update(sessionCreated(state, created.id)))
            .catch((error) => update({ ...state, banner: errorBanner(error) }));
    },
    generate() {
        if (state.sessionId === null || state.busy)
            return;
        void completeTurn(state.sessionId, client.generate(state.sessionId, state.draft));
    },
    refine() {
        if (state.sessionId === null || state.busy)
            return;
        void completeTurn(state.sessionId, client.refine(state.sessionId, state.refineDraft));
    },
    setDraft(text) {
        state = draftChanged(state, text); // no re-render; the textarea already holds the text
    },
    setRefineDraft(text) {
        state = refineDraftChanged(state, text);
    },
    selectLocus(locus) {
        update(locusSelected(state, state.selectedLocus === locus ? null : locus));
    },
    downloadDevice() {
        if (state.sessionId === null)
            return;
        client
            .getSpec(state.sessionId)
            .then((spec) => download(exportFileName("device"), JSON.stringify(spec, null, 2), "application/json"))
            .catch((error) => update({ ...state, banner: errorBanner(error) }));
    },
    downloadNetlist() {
        if (state.sessionId === null)
            return;
        client
            .getExport(state.sessionId, "flat")
            .then((text) => download(exportFileName("netlist"), text, "text/plain"))
            .catch((error) => update({ ...state, banner: errorBanner(error) }));
    },
};
update(initialState);
