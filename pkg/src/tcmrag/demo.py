"""Bundled demonstration corpus with scripted extraction responses.

Three small books of classical-style text, one chunk per chapter, and a
canned LLM response per chunk. The responses deliberately include messy
shapes (fences, prose around the array), four duplicated triples and three
invalid predicates, so an end-to-end run exercises the tolerant parser, the
skip rule and provenance merging while staying fully deterministic and
offline. The clean triple inventory doubles as the gold set for the
extraction metrics.
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import yaml

from .corpus import BookSource, Chunk, chunk_books, parse_corpus
from .extraction.client import MockLlmClient, chunk_fingerprint
from .extraction.pipeline import ExtractionReport, extract_corpus
from .graph.build import build_graph
from .graph.store import GraphStore

DEMO_QUESTION = "月经不调如何调治？"
DEMO_ANSWER_TEXT = (
    "据所引证据，四物汤主治月经不调，经行腹痛亦宜之，"
    "方用当归、川芎、白芍、熟地黄 (书: 调经要略, 章: 四物汤方论, 块: 0)。"
)

FIXTURE_RECORDS: tuple[dict, ...] = (
    {
        "book": "调经要略",
        "book_id": "B1",
        "specialty": "Gynecology",
        "section": "调经",
        "chapter": "调经总论",
        "text": "妇人以血为本，血海盈亏，月事以时下为顺。若先期后期，量多量少，皆为月经不调。月经不调者，常见经行腹痛，审其寒热虚实而调之。",
    },
    {
        "book": "调经要略",
        "book_id": "B1",
        "specialty": "Gynecology",
        "section": "调经",
        "chapter": "四物汤方论",
        "text": "四物汤者，调经之总方也。当归、川芎、白芍、熟地黄四味等分，水煎温服。主治月经不调，经行腹痛者尤宜。血虚者倍熟地黄，血滞者倍当归。",
    },
    {
        "book": "调经要略",
        "book_id": "B1",
        "specialty": "Gynecology",
        "section": "调经",
        "chapter": "逍遥散方论",
        "text": "逍遥散治郁证，肝气不舒，两胁作痛。方用柴胡、白芍等味，疏肝解郁。妇人情志不遂，月事因而失常者，先服逍遥散，继以四物汤调其血，月经不调可愈。",
    },
    {
        "book": "调经要略",
        "book_id": "B1",
        "specialty": "Gynecology",
        "section": "崩漏",
        "chapter": "崩漏辨治",
        "text": "崩者血暴下，漏者血淋漓不断。崩漏之候，漏下不止，面色萎黄。治崩宜固摄，治漏宜养血，不可概投寒凉。",
    },
    {
        "book": "调经要略",
        "book_id": "B1",
        "specialty": "Gynecology",
        "section": "崩漏",
        "chapter": "胶艾汤方论",
        "text": "胶艾汤主崩漏，漏下不止者服之。方用阿胶、艾叶，佐以当归养血，如四物汤用当归之意。温经止血，虚寒者最宜。",
    },
    {
        "book": "产宝辑要",
        "book_id": "B2",
        "specialty": "Obstetrics",
        "chapter": "安胎篇",
        "text": "妊娠胎气不固，谓之胎动不安。其候腰酸腹坠，甚则见红。孕妇宜静养，慎起居，节饮食，药以安胎为先。",
    },
    {
        "book": "产宝辑要",
        "book_id": "B2",
        "specialty": "Obstetrics",
        "chapter": "泰山磐石散考",
        "text": "泰山磐石散，安胎之圣药也，主治胎动不安。方中人参补气，白术健脾，气旺则胎自固。屡堕胎者，宜早服之。",
    },
    {
        "book": "产宝辑要",
        "book_id": "B2",
        "specialty": "Obstetrics",
        "chapter": "产后调护",
        "text": "产后血晕，恶露不行，败血上攻所致。轻者头眩眼花，重者不省人事。产后诸症，与经病相通，月经不调者产后尤须调护，经行腹痛之人亦然。",
    },
    {
        "book": "产宝辑要",
        "book_id": "B2",
        "specialty": "Obstetrics",
        "chapter": "生化汤论",
        "text": "生化汤为产后要方，主治产后血晕，恶露不行者。方用当归、桃仁，化瘀生新。产后七日内服之，瘀去则新血自生。",
    },
    {
        "book": "求嗣真诠",
        "book_id": "B3",
        "specialty": "Fertility",
        "chapter": "种子总说",
        "text": "男女合而有子，天地之大德也。婚久不孕者，当先审男女之因。女子经调为受孕之本，经不调则不孕。",
    },
    {
        "book": "求嗣真诠",
        "book_id": "B3",
        "specialty": "Fertility",
        "chapter": "五子衍宗丸解",
        "text": "五子衍宗丸，种子第一方，主治不孕。五味皆子，以子养子，填精补髓。男服固精，女服暖宫。",
    },
    {
        "book": "求嗣真诠",
        "book_id": "B3",
        "specialty": "Fertility",
        "chapter": "温经养血篇",
        "text": "胞宫虚寒者，温其经；血少者，养其血。经暖血足，自能摄精成孕。胎前诸方如泰山磐石散，亦治胎动不安，求嗣者可参看。",
    },
)


def _triples(*items: tuple[str, str, str]) -> str:
    return json.dumps(
        [{"subject": s, "predicate": p, "object": o} for s, p, o in items],
        ensure_ascii=False,
        indent=2,
    )


# Scripted extraction output per chapter. Values are raw response text as a
# model would produce it, array plus whatever wrapping that chapter fakes.
CHAPTER_RESPONSES: dict[str, str] = {
    "调经总论": _triples(
        ("调经总论", "Describe Disease", "月经不调"),
        ("月经不调", "Symptoms Present", "经行腹痛"),
    ),
    "四物汤方论": _triples(
        ("四物汤方论", "Treatment Plan", "四物汤"),
        ("四物汤", "Treat Disease", "月经不调"),
        ("四物汤", "Ingredient Use", "当归"),
        ("四物汤", "Ingredient Use", "川芎"),
        ("四物汤", "Ingredient Use", "白芍"),
        ("四物汤", "Ingredient Use", "熟地黄"),
        ("四物汤", "Treatment Symptom", "经行腹痛"),
    ),
    # Fenced, plus one duplicate of a chapter-2 triple and one predicate
    # outside the schema (skipped).
    "逍遥散方论": "```json\n"
    + _triples(
        ("逍遥散方论", "Treatment Plan", "逍遥散"),
        ("逍遥散", "Treat Disease", "郁证"),
        ("逍遥散", "Treatment Symptom", "胁痛"),
        ("逍遥散", "Ingredient Use", "柴胡"),
        ("逍遥散", "Ingredient Use", "白芍"),
        ("四物汤", "Treat Disease", "月经不调"),
        ("逍遥散", "Cures", "郁证"),
    )
    + "\n```",
    "崩漏辨治": _triples(
        ("崩漏辨治", "Describe Disease", "崩漏"),
        ("崩漏", "Symptoms Present", "漏下不止"),
    ),
    "胶艾汤方论": _triples(
        ("胶艾汤方论", "Treatment Plan", "胶艾汤"),
        ("胶艾汤", "Treat Disease", "崩漏"),
        ("胶艾汤", "Ingredient Use", "阿胶"),
        ("胶艾汤", "Ingredient Use", "艾叶"),
        ("胶艾汤", "Treatment Symptom", "漏下不止"),
        ("四物汤", "Ingredient Use", "当归"),
    ),
    # Prose preamble plus an invalid predicate.
    "安胎篇": "好的，提取结果如下：\n"
    + _triples(
        ("安胎篇", "Describe Disease", "胎动不安"),
        ("胎动不安", "Symptoms Present", "腰酸腹坠"),
        ("安胎篇", "Mentions", "胎动不安"),
    ),
    "泰山磐石散考": _triples(
        ("泰山磐石散考", "Treatment Plan", "泰山磐石散"),
        ("泰山磐石散", "Treat Disease", "胎动不安"),
        ("泰山磐石散", "Ingredient Use", "人参"),
        ("泰山磐石散", "Ingredient Use", "白术"),
    ),
    "产后调护": _triples(
        ("产后调护", "Describe Disease", "产后血晕"),
        ("产后血晕", "Symptoms Present", "恶露不行"),
        ("月经不调", "Symptoms Present", "经行腹痛"),
    ),
    "生化汤论": _triples(
        ("生化汤论", "Treatment Plan", "生化汤"),
        ("生化汤", "Treat Disease", "产后血晕"),
        ("生化汤", "Ingredient Use", "当归"),
        ("生化汤", "Ingredient Use", "桃仁"),
        ("生化汤", "related to", "产后血晕"),
    ),
    "种子总说": _triples(("种子总说", "Describe Disease", "不孕")),
    "五子衍宗丸解": _triples(
        ("五子衍宗丸解", "Treatment Plan", "五子衍宗丸"),
        ("五子衍宗丸", "Treat Disease", "不孕"),
    ),
    # Nothing new here, only a re-assertion of a chapter-7 triple, with
    # trailing chatter after the array.
    "温经养血篇": _triples(("泰山磐石散", "Treat Disease", "胎动不安"))
    + "\n以上即本段可提取的全部三元组。",
}

# The 36 distinct valid triples above, used as the gold annotation set.
GOLD_TRIPLES: tuple[tuple[str, str, str], ...] = (
    ("调经总论", "Describe Disease", "月经不调"),
    ("月经不调", "Symptoms Present", "经行腹痛"),
    ("四物汤方论", "Treatment Plan", "四物汤"),
    ("四物汤", "Treat Disease", "月经不调"),
    ("四物汤", "Ingredient Use", "当归"),
    ("四物汤", "Ingredient Use", "川芎"),
    ("四物汤", "Ingredient Use", "白芍"),
    ("四物汤", "Ingredient Use", "熟地黄"),
    ("四物汤", "Treatment Symptom", "经行腹痛"),
    ("逍遥散方论", "Treatment Plan", "逍遥散"),
    ("逍遥散", "Treat Disease", "郁证"),
    ("逍遥散", "Treatment Symptom", "胁痛"),
    ("逍遥散", "Ingredient Use", "柴胡"),
    ("逍遥散", "Ingredient Use", "白芍"),
    ("崩漏辨治", "Describe Disease", "崩漏"),
    ("崩漏", "Symptoms Present", "漏下不止"),
    ("胶艾汤方论", "Treatment Plan", "胶艾汤"),
    ("胶艾汤", "Treat Disease", "崩漏"),
    ("胶艾汤", "Ingredient Use", "阿胶"),
    ("胶艾汤", "Ingredient Use", "艾叶"),
    ("胶艾汤", "Treatment Symptom", "漏下不止"),
    ("安胎篇", "Describe Disease", "胎动不安"),
    ("胎动不安", "Symptoms Present", "腰酸腹坠"),
    ("泰山磐石散考", "Treatment Plan", "泰山磐石散"),
    ("泰山磐石散", "Treat Disease", "胎动不安"),
    ("泰山磐石散", "Ingredient Use", "人参"),
    ("泰山磐石散", "Ingredient Use", "白术"),
    ("产后调护", "Describe Disease", "产后血晕"),
    ("产后血晕", "Symptoms Present", "恶露不行"),
    ("生化汤论", "Treatment Plan", "生化汤"),
    ("生化汤", "Treat Disease", "产后血晕"),
    ("生化汤", "Ingredient Use", "当归"),
    ("生化汤", "Ingredient Use", "桃仁"),
    ("种子总说", "Describe Disease", "不孕"),
    ("五子衍宗丸解", "Treatment Plan", "五子衍宗丸"),
    ("五子衍宗丸", "Treat Disease", "不孕"),
)


def demo_corpus_jsonl() -> str:
    return "\n".join(json.dumps(r, ensure_ascii=False) for r in FIXTURE_RECORDS) + "\n"


def demo_books() -> list[BookSource]:
    return parse_corpus(io.StringIO(demo_corpus_jsonl()))


def demo_chunks(books: list[BookSource] | None = None) -> list[Chunk]:
    return chunk_books(books if books is not None else demo_books())


def demo_mock_responses() -> dict[str, str]:
    """Scripted responses keyed by chunk fingerprint.

    Every chapter fits one chunk, so the chunk text is the chapter body.
    """
    by_chapter = {r["chapter"]: r["text"] for r in FIXTURE_RECORDS}
    return {
        chunk_fingerprint(by_chapter[chapter]): response
        for chapter, response in CHAPTER_RESPONSES.items()
    }


def demo_client() -> MockLlmClient:
    return MockLlmClient(demo_mock_responses(), answer_default=DEMO_ANSWER_TEXT)


def build_demo_report(max_workers: int = 4) -> ExtractionReport:
    return extract_corpus(demo_chunks(), demo_client(), max_workers=max_workers)


def build_demo_store(max_workers: int = 4) -> GraphStore:
    books = demo_books()
    chunks = chunk_books(books)
    report = extract_corpus(chunks, demo_client(), max_workers=max_workers)
    return build_graph(books, chunks, report.triples)


def write_workspace(directory: str | Path) -> Path:
    """Materialize the demo as files: corpus, mock responses, gold triples,
    ratings sample, and a ready-to-use config. Returns the config path."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    (root / "corpus.jsonl").write_text(demo_corpus_jsonl(), encoding="utf-8")
    (root / "mock_responses.json").write_text(
        json.dumps(demo_mock_responses(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    gold_lines = [
        json.dumps({"subject": s, "predicate": p, "object": o}, ensure_ascii=False)
        for s, p, o in GOLD_TRIPLES
    ]
    (root / "gold.jsonl").write_text("\n".join(gold_lines) + "\n", encoding="utf-8")
    ratings = [
        {"item": "q1", "rater": "r1", "score": 5},
        {"item": "q1", "rater": "r2", "score": 4},
        {"item": "q1", "rater": "r3", "score": 5},
        {"item": "q2", "rater": "r1", "score": 4},
        {"item": "q2", "rater": "r2", "score": 3},
        {"item": "q2", "rater": "r3", "score": 4},
        {"item": "q3", "rater": "r1", "score": 5},
        {"item": "q3", "rater": "r2", "score": 5},
        {"item": "q3", "rater": "r3", "score": 2},
    ]
    (root / "ratings.jsonl").write_text(
        "\n".join(json.dumps(r) for r in ratings) + "\n", encoding="utf-8"
    )
    config = {
        "corpus_path": "corpus.jsonl",
        "snapshot_path": "graph.snapshot",
        "llm": {
            "kind": "mock",
            "responses_path": "mock_responses.json",
            "answer_text": DEMO_ANSWER_TEXT,
        },
    }
    config_path = root / "config.yaml"
    config_path.write_text(
        yaml.safe_dump(config, allow_unicode=True, sort_keys=False), encoding="utf-8"
    )
    return config_path
