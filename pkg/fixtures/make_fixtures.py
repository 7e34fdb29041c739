"""Regenerates the bundled fixture corpora and mock LLM scripts.

Run from the repository root:  python3 fixtures/make_fixtures.py
Output is deterministic; the committed files are exactly what this writes.

Two bundles:
  commonwealth/  the head-of-the-Commonwealth demo (service/API/frontend)
  mini_eval/     a 20-question capital-city dataset with corpora and a mock
                 script exercising detection hits/misses, multi-round and
                 preservation-rejected corrections, and a never-approved run
"""

from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).parent


def write_jsonl(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"wrote {path} ({len(records)} records)")


# Shared fallback rules: keep scripted runs deterministic on any
# prompt the specific rules miss. Order matters; these go last.
GENERIC_RULES = [
    {"role": "detector", "match": "\nVerdict:", "reply": "False"},
    {"role": "detector", "match": "\nRationale:", "reply": "The evidence contradicts the answer."},
    {"role": "corrector", "match": "\nSpans:", "reply": 'SPAN: "__none__"'},
    {"role": "corrector", "match": "\nCorrected answer:", "reply": "No correction available."},
    {"role": "corrector", "match": "\nReplacement:", "reply": "unknown"},
]


def detect_rule(answer: str, label: str) -> dict:
    return {"role": "detector", "match": f"Answer: {answer}\nVerdict:", "reply": label}


def rationale_rule(answer: str, rationale: str) -> dict:
    return {"role": "detector", "match": f"Answer: {answer}\nRationale:", "reply": rationale}


def spans_rule(candidate: str, span: str) -> dict:
    return {"role": "corrector", "match": f"Answer: {candidate}\nSpans:", "reply": f'SPAN: "{span}"'}


def revise_rule(span: str, attempt: int, replacement: str) -> dict:
    return {
        "role": "corrector",
        "match": f'Span (attempt {attempt}/5): "{span}"',
        "reply": replacement,
    }


# --------------------------------------------------------------------------
# commonwealth demo
# --------------------------------------------------------------------------

CW_QUESTION = "Who is the head of the Commonwealth?"
CW_ANSWER = "Queen Elizabeth II is the head of the Commonwealth realm."
CW_FIXED = "King Charles III is the head of the Commonwealth realm."


def make_commonwealth() -> None:
    out = ROOT / "commonwealth"
    write_jsonl(
        out / "web.jsonl",
        [
            {
                "query": f"{CW_QUESTION} {CW_ANSWER}",
                "snippets": [
                    "King Charles III became Head of the Commonwealth upon the death of Queen Elizabeth II in September 2022.",
                    "The Commonwealth of Nations is a voluntary association of 56 member states.",
                    "The Head of the Commonwealth is a ceremonial position currently held by King Charles III.",
                ],
            }
        ],
    )
    write_jsonl(
        out / "kb.jsonl",
        [
            {
                "id": "charles-iii",
                "text": "Charles III is King of the United Kingdom and 14 other Commonwealth realms. He became Head of the Commonwealth in September 2022.",
            },
            {
                "id": "head-of-commonwealth",
                "text": "The Head of the Commonwealth is the ceremonial leader who symbolises the free association of the member states of the Commonwealth of Nations.",
            },
            {
                "id": "elizabeth-ii",
                "text": "Elizabeth II was Queen of the United Kingdom and other Commonwealth realms from 1952 until her death in September 2022.",
            },
        ],
    )
    write_jsonl(
        out / "kg.jsonl",
        [
            {"id": "t1", "subject": "Charles III", "relation": "holds position", "object": "Head of the Commonwealth"},
            {"id": "t2", "subject": "Elizabeth II", "relation": "died in", "object": "September 2022"},
            {"id": "t3", "subject": "Commonwealth of Nations", "relation": "counts", "object": "56 member states"},
        ],
    )
    rules = [
        detect_rule(CW_ANSWER, "False"),
        detect_rule(CW_FIXED, "True"),
        rationale_rule(
            CW_ANSWER,
            "Evidence [1] states that King Charles III became Head of the Commonwealth in September 2022, so the answer naming Queen Elizabeth II is outdated.",
        ),
        spans_rule(CW_ANSWER, "Queen Elizabeth II"),
        revise_rule("Queen Elizabeth II", 1, "King Charles III"),
        {
            "role": "summarizer",
            "match": f"Question: {CW_QUESTION}",
            "reply": "King Charles III has been Head of the Commonwealth since September 2022, succeeding Queen Elizabeth II.",
        },
        *GENERIC_RULES,
    ]
    write_jsonl(out / "mock_llm.jsonl", rules)


# --------------------------------------------------------------------------
# mini_eval bundle: 20 capital-city triplets
# --------------------------------------------------------------------------

# (country, capital, wrong answer)
CAPITALS = [
    ("France", "Paris", "Lyon"),
    ("Australia", "Canberra", "Sydney"),
    ("Canada", "Ottawa", "Toronto"),          # detector miss (round-0 approval)
    ("Brazil", "Brasília", "Rio de Janeiro"),
    ("Japan", "Tokyo", "Osaka"),
    ("Turkey", "Ankara", "Istanbul"),
    ("Switzerland", "Bern", "Zurich"),        # two correction rounds
    ("Nigeria", "Abuja", "Lagos"),
    ("Pakistan", "Islamabad", "Karachi"),
    ("Kazakhstan", "Astana", "Almaty"),       # detector miss (round-0 approval)
    ("Morocco", "Rabat", "Casablanca"),
    ("Vietnam", "Hanoi", "Ho Chi Minh City"),
    ("Myanmar", "Naypyidaw", "Yangon"),
    ("Tanzania", "Dodoma", "Dar es Salaam"),  # verbose fix, preservation-rejected once
    ("Bolivia", "Sucre", "La Paz"),
    ("New Zealand", "Wellington", "Auckland"),  # corpus gap: no golden evidence
    ("India", "New Delhi", "Mumbai"),
    ("Egypt", "Cairo", "Alexandria"),           # corpus gap: no golden evidence
    ("South Korea", "Seoul", "Busan"),           # right answer misjudged False
    ("Ecuador", "Quito", "Guayaquil"),           # never approved (round limit)
]

NO_GOLDEN = {"New Zealand", "Egypt"}
DETECTOR_MISSES = {"Canada", "Kazakhstan"}
RIGHT_FALSE = {"South Korea"}
NEVER_CORRECTED = {"Ecuador"}
# Items whose top-ranked passage is a golden-free FAQ page (golden at rank 2).
GOLDEN_AT_2 = {"Japan", "Morocco"}

TANZANIA_VERBOSE = (
    "The capital of Tanzania is Dodoma, which became the capital in 1974 and"
    " hosts the National Assembly in the Dodoma Urban District."
)


def question(country: str) -> str:
    return f"What is the capital of {country}?"


def hallucinated(country: str, wrong: str) -> str:
    return f"The capital of {country} is {wrong}."


def corrected(country: str, capital: str) -> str:
    return f"The capital of {country} is {capital}."


def make_mini_eval() -> None:
    out = ROOT / "mini_eval"

    write_jsonl(
        out / "dataset.jsonl",
        [
            {
                "question": question(country),
                "right_answer": capital,
                "hallucinated_answer": hallucinated(country, wrong),
            }
            for country, capital, wrong in CAPITALS
        ],
    )

    kb, kg, web = [], [], []
    for i, (country, capital, wrong) in enumerate(CAPITALS, 1):
        if country in NO_GOLDEN:
            kb.append(
                {
                    "id": f"kb-{i}-fact",
                    "text": f"{country} is a country with a long history and a well known capital city.",
                }
            )
            kg.append({"id": f"kg-{i}", "subject": country, "relation": "is known for", "object": "its landscapes"})
            web.append(
                {
                    "query": f"{question(country)} {hallucinated(country, wrong)}",
                    "snippets": [f"Discover {country}: geography, culture and travel tips."],
                }
            )
            continue
        kb.append(
            {
                "id": f"kb-{i}-fact",
                "text": f"{capital} is the capital of {country}. It hosts the national government of {country}.",
            }
        )
        kb.append(
            {
                "id": f"kb-{i}-extra",
                "text": f"The capital of {country} is known for its markets, museums and universities.",
            }
        )
        if country in GOLDEN_AT_2:
            kb.append(
                {
                    "id": f"kb-{i}-faq",
                    "text": f"What is the capital of {country}? Many people ask this about the capital of {country}.",
                }
            )
        kg.append({"id": f"kg-{i}", "subject": country, "relation": "has capital", "object": capital})
        web.append(
            {
                "query": f"{question(country)} {hallucinated(country, wrong)}",
                "snippets": [
                    f"{capital} is the capital city of {country}.",
                    f"Travel guide: the best sights of {country}.",
                ],
            }
        )

    write_jsonl(out / "kb.jsonl", kb)
    write_jsonl(out / "kg.jsonl", kg)
    write_jsonl(out / "web.jsonl", web)

    rules: list[dict] = []
    for country, capital, wrong in CAPITALS:
        bad = hallucinated(country, wrong)
        good = corrected(country, capital)

        # detection of the right and the hallucinated answer
        rules.append(detect_rule(capital, "False" if country in RIGHT_FALSE else "True"))
        rules.append(detect_rule(bad, "True" if country in DETECTOR_MISSES else "False"))
        rules.append(
            rationale_rule(
                bad,
                f"Evidence [1] shows the capital of {country} is {capital}, but the answer claims {wrong}.",
            )
        )
        if country in DETECTOR_MISSES or country in NEVER_CORRECTED:
            continue  # no scripted correction path (missed, or left to fallbacks)

        if country == "Switzerland":
            # round 1 picks another wrong city, round 2 lands the right one
            interim = hallucinated(country, "Geneva")
            rules += [
                spans_rule(bad, wrong),
                revise_rule(wrong, 1, "Geneva"),
                detect_rule(interim, "False"),
                rationale_rule(
                    interim,
                    f"Evidence [1] shows the capital of {country} is {capital}, but the answer claims Geneva.",
                ),
                spans_rule(interim, "Geneva"),
                revise_rule("Geneva", 2, capital),
                detect_rule(good, "True"),
            ]
        elif country == "Tanzania":
            # round 1 is factually right but too verbose; round 2 trims it
            rules += [
                spans_rule(bad, wrong),
                revise_rule(
                    wrong,
                    1,
                    f"{capital}, which became the capital in 1974 and hosts the National Assembly in the Dodoma Urban District",
                ),
                detect_rule(TANZANIA_VERBOSE, "True"),
                spans_rule(TANZANIA_VERBOSE, "__not_in_text__"),
                {
                    "role": "corrector",
                    "match": f"Answer: {TANZANIA_VERBOSE}\nCorrected answer:",
                    "reply": good,
                },
                detect_rule(good, "True"),
            ]
        else:
            rules += [
                spans_rule(bad, wrong),
                revise_rule(wrong, 1, capital),
                detect_rule(good, "True"),
            ]

    rules += GENERIC_RULES
    write_jsonl(out / "mock_llm.jsonl", rules)


if __name__ == "__main__":
    make_commonwealth()
    make_mini_eval()
