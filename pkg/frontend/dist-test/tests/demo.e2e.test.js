/**
 * Scripted studio session against a real `circuitsmith serve --with-ui`
 * process with the bundled replay provider: create a session, generate the
 * fixture device, check the rule report is clean, run one refinement turn,
 * and download both exports. This drives exactly the client code paths the
 * browser UI uses.
 */
import assert from "node:assert/strict";
import { spawn } from "node:child_process";
import { mkdtempSync, writeFileSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { after, before, test } from "node:test";
import { fileURLToPath } from "node:url";
import { StudioClient } from "../src/api.js";
import { groupFindings, locusTarget } from "../src/model.js";
import { renderGraphSvg } from "../src/graph.js";
const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "..");
const DESCRIPTION = "Illuminate an LED while a pushbutton is held down.";
const REFINE_TEXT = "Add a second LED on pin D7 that lights whenever the first LED is off.";
const port = 18000 + Math.floor(Math.random() * 20000);
const base = `http://127.0.0.1:${port}`;
let server = null;
let workdir = "";
async function waitForHealth(timeoutMs = 30000) {
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
        try {
            const response = await fetch(`${base}/healthz`);
            if (response.ok)
                return;
        }
        catch {
            // not up yet
        }
        await new Promise((resolve) => setTimeout(resolve, 200));
    }
    throw new Error("service did not become healthy in time");
}
before(async () => {
    workdir = mkdtempSync(join(tmpdir(), "studio-demo-"));
    server = spawn("python3", [
        "-m", "circuitsmith", "serve",
        "--port", String(port),
        "--artifacts", join(workdir, "artifacts"),
        "--with-ui",
    ], { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] });
    server.stderr?.on("data", () => undefined);
    await waitForHealth();
});
after(() => {
    server?.kill("SIGTERM");
});
test("e2e: studio demo session against serve --with-ui", async () => {
    // the UI itself is served
    const index = await fetch(`${base}/`);
    assert.equal(index.status, 200);
    assert.match(await index.text(), /circuitsmith studio/);
    const client = new StudioClient(base);
    assert.equal(await client.health(), true);
    const created = await client.createSession("replay");
    assert.ok(created.id.length > 0);
    const turn = await client.generate(created.id, DESCRIPTION);
    assert.equal(turn.termination, "stop_token");
    assert.ok(turn.erc);
    const grouped = groupFindings(turn.erc);
    assert.equal(grouped.errors.length, 0);
    // graph document feeds the node-link view; every part is one node
    const graph = await client.getGraph(created.id);
    assert.equal(graph.nodes.length, turn.spec?.bill_of_materials.length);
    const svg = renderGraphSvg(graph);
    assert.match(svg, /<svg /);
    // a pin locus resolves to exactly one highlightable node
    assert.equal(locusTarget("pin:UNO.D2", graph), "UNO");
    const refined = await client.refine(created.id, REFINE_TEXT);
    assert.equal(refined.turn, 2);
    const ledCount = refined.spec?.bill_of_materials.filter((row) => row.part_type === "led").length;
    assert.equal(ledCount, 2);
    const history = await client.getHistory(created.id);
    assert.deepEqual(history.turns.map((t) => t.turn), [1, 2]);
    assert.equal(history.turns[1]?.erc_errors, 0);
    // download both exports the way the UI buttons do
    const deviceDoc = await client.getSpec(created.id);
    const devicePath = join(workdir, "design.device.json");
    writeFileSync(devicePath, JSON.stringify(deviceDoc, null, 2));
    const netlist = await client.getExport(created.id, "flat");
    const netlistPath = join(workdir, "design.netlist.txt");
    writeFileSync(netlistPath, netlist);
    const savedDevice = JSON.parse(readFileSync(devicePath, "utf-8"));
    assert.equal(savedDevice.bill_of_materials.length, deviceDoc.bill_of_materials.length);
    assert.match(readFileSync(netlistPath, "utf-8"), /^# flat netlist: \d+ nets/);
});
