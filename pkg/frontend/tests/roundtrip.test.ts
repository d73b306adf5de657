/** End-to-end console round-trip against a real service instance.
 *
 * Boots the demo workspace (mock LLM profile), serves it on a spare port,
 * and drives the console's own client, state fold and renderers against the
 * live /v1 API: question in, citation chips anchored to visible evidence,
 * explorer expansion showing the treatment's actual neighbors.
 */

import { execFile as execFileCb, spawn, type ChildProcess } from "node:child_process";
import { appendFile, mkdtemp, rm } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";

import { JSDOM } from "jsdom";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError, CONTENT_RELATIONS } from "../src/api.js";
import { mergeExpansion, visibleNodes } from "../src/explorer.js";
import { renderAnswerPane, renderEvidencePane, renderExplorerPane } from "../src/render.js";
import { answerReceived, initialState } from "../src/state.js";

const execFile = promisify(execFileCb);

const PORT = 8971;
const QUESTION = "月经不调如何调治？";

let workspace: string;
let server: ChildProcess | undefined;
const api = new ApiClient(`http://127.0.0.1:${PORT}`);

function freshDocument(): Document {
  return new JSDOM("<!doctype html><body></body>").window.document;
}

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError = "not attempted";
  while (Date.now() < deadline) {
    try {
      const health = await api.health();
      if (health.status === "ok") return;
      lastError = `health status ${health.status}`;
    } catch (err) {
      lastError = err instanceof Error ? err.message : String(err);
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up on port ${PORT}: ${lastError}`);
}

beforeAll(async () => {
  workspace = await mkdtemp(join(tmpdir(), "console-roundtrip-"));
  await execFile("tcmrag", ["demo-workspace", "--dir", workspace]);
  const config = join(workspace, "config.yaml");
  const { stdout } = await execFile("tcmrag", ["build-graph", "--config", config]);
  if (!stdout.includes("graph: 51 entities")) {
    throw new Error(`unexpected build output: ${stdout}`);
  }
  // The demo config has no service block, so this stays valid YAML.
  await appendFile(config, `service:\n  port: ${PORT}\n`);
  server = spawn("tcmrag", ["serve", "--config", config], { stdio: "ignore" });
  await waitForHealth(45_000);
});

afterAll(async () => {
  server?.kill();
  if (workspace) {
    await rm(workspace, { recursive: true, force: true });
  }
});

describe("console round-trip", () => {
  it("reports a healthy service with the demo graph loaded", async () => {
    const health = await api.health();
    expect(health.status).toBe("ok");
    expect(health.stats["entity_total"]).toBe(51);
  });

  it("renders the diagnostic answer with chips anchored to visible evidence lines", async () => {
    const answer = await api.qa(QUESTION);
    expect(answer.degraded).toBe(false);
    expect(answer.citations.length).toBeGreaterThan(0);

    const doc = freshDocument();
    doc.body.appendChild(renderAnswerPane(doc, answer));
    doc.body.appendChild(renderEvidencePane(doc, answer));

    const chips = [...doc.querySelectorAll<HTMLAnchorElement>(".citation-chip")];
    expect(chips).toHaveLength(answer.citations.length);
    for (const chip of chips) {
      const href = chip.getAttribute("href");
      expect(href).toMatch(/^#evidence-line-\d+$/);
      const target = doc.querySelector(href!);
      expect(target).not.toBeNull();
      expect(target!.classList.contains("evidence-line")).toBe(true);
      expect(target!.textContent!.trim().length).toBeGreaterThan(0);
    }
  });

  it("expands the cited treatment to exactly its ingredient and disease neighbors", async () => {
    const answer = await api.qa(QUESTION);
    const view = answerReceived({ ...initialState(), question: QUESTION }, answer);
    const treatment = visibleNodes(view.explorer).find(
      (node) => node.category === "Treatment" && node.name === "四物汤",
    );
    expect(treatment).toBeDefined();

    const response = await api.neighborhood(treatment!.id, {
      depth: 1,
      relations: CONTENT_RELATIONS,
    });
    const explorer = mergeExpansion(view.explorer, response);

    const doc = freshDocument();
    doc.body.appendChild(renderExplorerPane(doc, explorer, { onExpand: () => {} }));

    const byCategory = new Map<string, string[]>();
    for (const button of doc.querySelectorAll<HTMLButtonElement>(".node-button")) {
      const category = button.querySelector(".node-category")!.textContent!;
      const name = button.childNodes[0]!.textContent!;
      byCategory.set(category, [...(byCategory.get(category) ?? []), name]);
    }
    expect(byCategory.get("Ingredient")!.sort()).toEqual(["川芎", "当归", "熟地黄", "白芍"].sort());
    expect(byCategory.get("Disease")).toEqual(["月经不调"]);

    // Every edge on the canvas is one the service just returned, and all of
    // them made it there.
    const rows = [...doc.querySelectorAll<HTMLElement>(".explorer-edge")];
    expect(rows.map((row) => row.dataset["edgeId"]).sort()).toEqual(
      response.triples.map((triple) => triple.id).sort(),
    );

    // Expanding the same node again lands in the same state.
    const again = await api.neighborhood(treatment!.id, {
      depth: 1,
      relations: CONTENT_RELATIONS,
    });
    expect(mergeExpansion(explorer, again)).toEqual(explorer);
  });

  it("maps unknown entities to a 404 the explorer can badge", async () => {
    const err = await api.neighborhood("ffffffffffffffff").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).detail).toContain("no entity with id");
  });
});
