import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, CONTENT_RELATIONS } from "../src/api.js";
import { sampleAnswer, sampleNeighborhood } from "./fixtures.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("request shapes", () => {
  it("posts qa questions with the selected mode", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(sampleAnswer()));
    vi.stubGlobal("fetch", fetchMock);
    const answer = await new ApiClient("http://127.0.0.1:9").qa("头痛如何调治？");
    expect(answer.degraded).toBe(false);
    expect(fetchMock).toHaveBeenCalledOnce();
    const [url, init] = fetchMock.mock.calls[0]!;
    expect(url).toBe("http://127.0.0.1:9/v1/qa");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body)).toEqual({ question: "头痛如何调治？", mode: "diagnostic_qa" });
  });

  it("posts ingredient searches to their own route", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(sampleAnswer({ mode: "ingredient_lookup" })));
    vi.stubGlobal("fetch", fetchMock);
    await new ApiClient().searchIngredient("逍遥散");
    const [url, init] = fetchMock.mock.calls[0]!;
    expect(url).toBe("/v1/search/ingredient");
    expect(JSON.parse(init.body)).toEqual({ query: "逍遥散" });
  });

  it("encodes neighborhood options as query parameters", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(sampleNeighborhood("e-xiaoyao")));
    vi.stubGlobal("fetch", fetchMock);
    await new ApiClient().neighborhood("e-xiaoyao", {
      depth: 1,
      relations: CONTENT_RELATIONS,
      direction: "both",
    });
    const url = new URL(fetchMock.mock.calls[0]![0], "http://localhost");
    expect(url.pathname).toBe("/v1/graph/neighborhood");
    expect(url.searchParams.get("entity")).toBe("e-xiaoyao");
    expect(url.searchParams.get("depth")).toBe("1");
    expect(url.searchParams.get("relations")).toBe(CONTENT_RELATIONS.join(","));
    expect(url.searchParams.get("direction")).toBe("both");
  });

  it("omits parameters left at their service defaults", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(sampleNeighborhood("e-xiaoyao")));
    vi.stubGlobal("fetch", fetchMock);
    await new ApiClient().neighborhood("e-xiaoyao");
    const url = new URL(fetchMock.mock.calls[0]![0], "http://localhost");
    expect([...url.searchParams.keys()]).toEqual(["entity"]);
  });
});

describe("error mapping", () => {
  it("carries the service's detail message on non-ok statuses", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn().mockResolvedValue(jsonResponse({ detail: "no entity with id 'ffff'" }, 404)),
    );
    const err = await new ApiClient().neighborhood("ffff").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).detail).toBe("no entity with id 'ffff'");
  });

  it("falls back to the status text when the error body is not JSON", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn().mockResolvedValue(new Response("<html>bad gateway</html>", { status: 502, statusText: "Bad Gateway" })),
    );
    const err = await new ApiClient().qa("q").catch((e: unknown) => e);
    expect((err as ApiError).status).toBe(502);
    expect((err as ApiError).detail).toBe("Bad Gateway");
  });

  it("flattens structured validation details into a readable string", async () => {
    const detail = [{ loc: ["body", "mode"], msg: "invalid mode" }];
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse({ detail }, 422)));
    const err = await new ApiClient().qa("q").catch((e: unknown) => e);
    expect((err as ApiError).status).toBe(422);
    expect((err as ApiError).detail).toContain("invalid mode");
  });

  it("maps network failures to status 0 so the UI can tell them apart", async () => {
    vi.stubGlobal("fetch", vi.fn().mockRejectedValue(new TypeError("fetch failed")));
    const err = await new ApiClient().health().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(0);
    expect((err as ApiError).detail).toBe("fetch failed");
  });
});
