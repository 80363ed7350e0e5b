/**
 * DOM rendering. The whole app re-renders from ViewState on every change;
 * at studio scale that is simpler and fast enough. All data shown comes
 * straight from the server's documents.
 */
import { DeviceDocument, Finding } from "./api.js";
import { renderGraphSvg } from "./graph.js";
import { ViewState, groupFindings, locusTarget } from "./model.js";

export interface Actions {
  newSession(): void;
  generate(): void;
  refine(): void;
  setDraft(text: string): void;
  setRefineDraft(text: string): void;
  selectLocus(locus: string | null): void;
  downloadDevice(): void;
  downloadNetlist(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function bomTable(spec: DeviceDocument): HTMLElement {
  const head = el("tr", {}, el("th", {}, "ref"), el("th", {}, "type"), el("th", {}, "value"), el("th", {}, "note"));
  const rows = spec.bill_of_materials.map((row) =>
    el("tr", {},
      el("td", { class: "mono" }, row.ref),
      el("td", {}, row.part_type),
      el("td", {}, row.value ?? ""),
      el("td", { class: "note" }, row.note ?? ""),
    ),
  );
  return el("table", { class: "bom" }, head, ...rows);
}

function pinoutTables(spec: DeviceDocument): HTMLElement {
  const container = el("div", { class: "pinouts" });
  for (const [ref, pins] of Object.entries(spec.pinouts)) {
    const rows = pins.map((p) =>
      el("tr", {}, el("td", { class: "mono" }, p.pin), el("td", { class: "note" }, p.note ?? "")),
    );
    container.append(el("div", { class: "pinout-card" }, el("h4", {}, ref), el("table", {}, ...rows)));
  }
  return container;
}

function findingRow(finding: Finding, state: ViewState, actions: Actions): HTMLElement {
  const row = el(
    "li",
    { class: `finding ${finding.severity}${state.selectedLocus === finding.locus ? " selected" : ""}` },
    el("span", { class: "rule mono" }, finding.rule_id),
    el("span", { class: "msg" }, finding.message),
    el("span", { class: "locus mono" }, finding.locus),
  );
  row.addEventListener("click", () => actions.selectLocus(finding.locus));
  return row;
}

function ercPanel(state: ViewState, actions: Actions): HTMLElement {
  const { errors, warnings } = groupFindings(state.erc);
  const panel = el("section", { class: "erc" }, el("h3", {}, "Rule checks"));
  if (state.erc === null) {
    panel.append(el("p", { class: "hint" }, "No checks yet."));
    return panel;
  }
  panel.append(
    el("p", { class: state.erc.clean ? "status clean" : "status dirty" },
      state.erc.clean
        ? `clean: ${errors.length} errors, ${warnings.length} warnings`
        : `${errors.length} errors, ${warnings.length} warnings`),
  );
  if (errors.length) {
    panel.append(el("h4", {}, "Errors"), el("ul", {}, ...errors.map((f) => findingRow(f, state, actions))));
  }
  if (warnings.length) {
    panel.append(el("h4", {}, "Warnings"), el("ul", {}, ...warnings.map((f) => findingRow(f, state, actions))));
  }
  return panel;
}

function historyPanel(state: ViewState): HTMLElement {
  const panel = el("section", { class: "history" }, el("h3", {}, "Turns"));
  const items = state.history.map((turn) =>
    el("li", {},
      el("span", { class: "turn-no" }, `#${turn.turn}`),
      el("span", { class: "turn-text" }, turn.user_text),
      el("span", { class: "turn-erc" }, `${turn.erc_errors} err / ${turn.erc_warnings} warn`),
    ),
  );
  panel.append(items.length ? el("ol", {}, ...items) : el("p", { class: "hint" }, "No turns yet."));
  return panel;
}

export function render(root: HTMLElement, state: ViewState, actions: Actions): void {
  root.replaceChildren();

  const description = el("textarea", {
    id: "description",
    placeholder: "Describe the device, e.g. 'Illuminate an LED while a pushbutton is held down.'",
  }) as HTMLTextAreaElement;
  description.value = state.draft;
  description.addEventListener("input", () => actions.setDraft(description.value));

  const newButton = el("button", { id: "new-session" }, "New session");
  newButton.addEventListener("click", () => actions.newSession());
  const generateButton = el("button", { id: "generate", class: "primary" }, state.busy ? "Working" : "Generate");
  generateButton.addEventListener("click", () => actions.generate());
  if (state.busy || state.sessionId === null) generateButton.setAttribute("disabled", "");
  if (state.busy) generateButton.append(el("span", { class: "spinner" }));

  const header = el("header", {},
    el("h1", {}, "circuitsmith studio"),
    el("div", { class: "session mono" }, state.sessionId ? `session ${state.sessionId.slice(0, 8)}` : "no session"),
  );

  const controls = el("section", { class: "controls" }, description, el("div", { class: "buttons" }, newButton, generateButton));

  const bannerNode = state.banner
    ? el("div", { class: `banner ${state.banner.kind}` }, state.banner.message)
    : el("div", {});

  const main = el("main", {});
  if (state.spec) {
    const graphHighlight = state.selectedLocus ? locusTarget(state.selectedLocus, state.graph) : null;
    const graphHost = el("section", { class: "graph" }, el("h3", {}, "Netlist graph"));
    const svgHost = el("div", { class: "svg-host" });
    if (state.graph) svgHost.innerHTML = renderGraphSvg(state.graph, { highlight: graphHighlight });
    graphHost.append(svgHost);

    const codePane = el("section", { class: "code" },
      el("h3", {}, `Code (${state.spec.code?.language_tag ?? "none"})`),
      el("pre", {}, state.spec.code?.source ?? "(no code artifact)"),
    );

    const downloadDevice = el("button", { id: "download-device" }, "Download device document");
    downloadDevice.addEventListener("click", () => actions.downloadDevice());
    const downloadNetlist = el("button", { id: "download-netlist" }, "Download flat netlist");
    downloadNetlist.addEventListener("click", () => actions.downloadNetlist());

    const refineInput = el("input", {
      id: "refine-text",
      type: "text",
      placeholder: "Refine: e.g. 'Add a second LED on pin D7.'",
    }) as HTMLInputElement;
    refineInput.value = state.refineDraft;
    refineInput.addEventListener("input", () => actions.setRefineDraft(refineInput.value));
    const refineButton = el("button", { id: "refine", class: "primary" }, "Refine");
    refineButton.addEventListener("click", () => actions.refine());
    if (state.busy) refineButton.setAttribute("disabled", "");

    main.append(
      el("section", { class: "spec" },
        el("h3", {}, "Bill of materials"),
        bomTable(state.spec),
        el("h3", {}, "Pinouts"),
        pinoutTables(state.spec),
      ),
      graphHost,
      ercPanel(state, actions),
      codePane,
      el("section", { class: "refine" }, refineInput, refineButton),
      el("section", { class: "exports" }, downloadDevice, downloadNetlist),
      historyPanel(state),
    );
  } else {
    main.append(el("p", { class: "hint" }, "Create a session and describe a device to begin."));
  }

  root.append(header, controls, bannerNode, main);
}
