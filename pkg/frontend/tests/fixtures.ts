/** Hand-built payloads shaped exactly like the service JSON. */

import type {
  AnswerPayload,
  Citation,
  EntityRef,
  EvidenceLine,
  GraphEdge,
  NeighborhoodResponse,
} from "../src/api.js";

export function entity(id: string, name: string, category: string): EntityRef {
  return { id, name, category };
}

export function citation(chunkId: string, book = "方书", chapter = "头痛门"): Citation {
  return { book, chapter, chunk_index: 0, chunk_id: chunkId };
}

export function edge(id: string, subject: string, relation: string, object: string): GraphEdge {
  return { id, subject, relation, object, provenance: ["c1"] };
}

export function line(
  tripleId: string,
  subject: EntityRef,
  relation: string,
  object: EntityRef,
  chunkId: string,
  score = 1.0,
): EvidenceLine {
  return {
    text: `${subject.name} -[${relation}]-> ${object.name} (书: 方书, 章: 头痛门, 块: 0)`,
    score,
    triple_id: tripleId,
    subject,
    relation,
    object,
    citation: citation(chunkId),
  };
}

export const XIAOYAO = entity("e-xiaoyao", "逍遥散", "Treatment");
export const HEADACHE = entity("e-headache", "头痛", "Symptom");
export const CHAIHU = entity("e-chaihu", "柴胡", "Ingredient");
export const YUZHENG = entity("e-yuzheng", "郁证", "Disease");

export function sampleAnswer(overrides: Partial<AnswerPayload> = {}): AnswerPayload {
  return {
    question: "头痛如何调治？",
    mode: "diagnostic_qa",
    text: "据所引证据，逍遥散治头痛。\n仅供参考。",
    degraded: false,
    citations: [citation("c1")],
    context: [
      line("t1", XIAOYAO, "Treatment Symptom", HEADACHE, "c1"),
      line("t2", XIAOYAO, "Ingredient Use", CHAIHU, "c1", 0.8),
    ],
    ...overrides,
  };
}

export function sampleNeighborhood(
  seed: string,
  overrides: Partial<NeighborhoodResponse> = {},
): NeighborhoodResponse {
  return {
    seed,
    entities: [XIAOYAO, HEADACHE, CHAIHU],
    triples: [
      edge("t1", XIAOYAO.id, "Treatment Symptom", HEADACHE.id),
      edge("t2", XIAOYAO.id, "Ingredient Use", CHAIHU.id),
    ],
    ...overrides,
  };
}
