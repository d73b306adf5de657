"""Knowledge-graph construction and graph-grounded question answering for
classical Chinese medical texts.

The pipeline: chunk a chapter corpus, extract typed triples with an LLM
behind a strict output contract, assemble a property graph with provenance,
and answer questions by traversing typed multi-hop paths and citing the
chunks the evidence came from.
"""

from .corpus import chunk_books, corpus_stats, load_corpus_path, parse_corpus
from .extraction import MockLlmClient, extract_corpus
from .generation import AnswerMode, RetrievalParams, answer_question
from .graph import GraphStore, build_graph, load_snapshot, save_snapshot
from .relations import EntityCategory, RelationType
from .retrieval import assemble_context, link_entities, score_paths, traverse

__version__ = "0.1.0"

__all__ = [
    "AnswerMode",
    "EntityCategory",
    "GraphStore",
    "MockLlmClient",
    "RelationType",
    "RetrievalParams",
    "answer_question",
    "assemble_context",
    "build_graph",
    "chunk_books",
    "corpus_stats",
    "extract_corpus",
    "link_entities",
    "load_corpus_path",
    "load_snapshot",
    "parse_corpus",
    "save_snapshot",
    "score_paths",
    "traverse",
    "__version__",
]
