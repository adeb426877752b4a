"""Generate the bundled toy corpus and fixtures under data/.

Everything is seeded, so re-running the script reproduces the committed
files byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
import random
from datetime import date, timedelta
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

ENTITIES = [
    ("Bayern München", "ORG"),
    ("Borussia Dortmund", "ORG"),
    ("Lufthansa", "ORG"),
    ("Siemens", "ORG"),
    ("Volkswagen", "ORG"),
    ("Telekom", "ORG"),
    ("Müller", "PER"),
    ("Kimmich", "PER"),
    ("Scholz", "PER"),
    ("Habeck", "PER"),
    ("Berlin", "LOC"),
    ("München", "LOC"),
    ("Hamburg", "LOC"),
    ("Dortmund", "LOC"),
    ("Bundesliga", "EVENT"),
    ("Streik", "EVENT"),
    ("Tarifrunde", "EVENT"),
    ("Inflation", "MISC"),
    ("Quartalszahlen", "MISC"),
    ("Heimspiel", "MISC"),
]

TITLE_TEMPLATES = [
    ("sport", "{org} gewinnt {misc} gegen {org2}"),
    ("sport", "{per} trifft doppelt für {org}"),
    ("sport", "{org} verliert {misc} in {loc}"),
    ("sport", "{per} fehlt {org} im {misc}"),
    ("wirtschaft", "{org} legt {misc} in {loc} vor"),
    ("wirtschaft", "{event} bei {org} trifft Kunden in {loc}"),
    ("wirtschaft", "{org} warnt vor {misc} im Herbst"),
    ("wirtschaft", "{org} baut Werk in {loc} aus"),
    ("politik", "{per} verteidigt Kurs gegen {misc}"),
    ("politik", "{per} besucht {loc} nach {event}"),
]

BODY_TEMPLATES = [
    "Die {misc} bleibt das beherrschende Thema in {loc}.",
    "{org} bestätigte am Dienstag entsprechende Berichte.",
    "Nach Angaben von {per} soll die Entscheidung bald fallen.",
    "In {loc} reagierten Beobachter überrascht auf die Nachricht.",
    "Der {event} hatte sich seit Wochen angekündigt.",
    "{org} wollte sich auf Anfrage zunächst nicht äußern.",
    "Für {per} ist es bereits der zweite Erfolg in diesem Jahr.",
    "Analysten hatten mit einem schwächeren Ergebnis gerechnet.",
    "Die Gewerkschaft kündigte weitere Gespräche mit {org} an.",
    "Fans feierten {per} noch lange nach dem Abpfiff.",
    "Zuletzt hatte {org} die Prognose für das Gesamtjahr angehoben.",
    "Die Stadt {loc} rechnet mit erheblichen Einschränkungen.",
    "{per} sprach von einem wichtigen Signal für {loc}.",
    "Der Rückstand auf {org} beträgt damit weiter vier Punkte.",
    "Beschäftigte von {org} hatten die Arbeit zeitweise niedergelegt.",
]


def pick_entities(rng: random.Random) -> dict[str, str]:
    orgs = [e for e, t in ENTITIES if t == "ORG"]
    pers = [e for e, t in ENTITIES if t == "PER"]
    locs = [e for e, t in ENTITIES if t == "LOC"]
    events = [e for e, t in ENTITIES if t == "EVENT"]
    miscs = [e for e, t in ENTITIES if t == "MISC"] + events
    org, org2 = rng.sample(orgs, 2)
    return {
        "org": org,
        "org2": org2,
        "per": rng.choice(pers),
        "loc": rng.choice(locs),
        "event": rng.choice(events),
        "misc": rng.choice(miscs),
    }


def make_articles(rng: random.Random, n: int) -> list[dict]:
    articles = []
    start = date(2024, 2, 1)
    for i in range(n):
        dept, template = TITLE_TEMPLATES[i % len(TITLE_TEMPLATES)]
        slots = pick_entities(rng)
        title = template.format(**slots)
        n_sentences = rng.randint(4, 6)
        body_sents = [
            t.format(**slots) for t in rng.sample(BODY_TEMPLATES, n_sentences)
        ]
        # Lead sentence mentions the title entities so keyword features
        # and catalog matching have something to find.
        lead = f"{slots['org']} sorgt in {slots['loc']} für Schlagzeilen."
        text = " ".join([lead] + body_sents)
        articles.append(
            {
                "id": f"art-{i + 1:03d}",
                "title": title,
                "text": text,
                "department": dept,
                "published_at": (start + timedelta(days=(i * 3) % 85)).isoformat(),
                "_slots": slots,
            }
        )
    return articles


def main() -> None:
    rng = random.Random(42)
    DATA.mkdir(exist_ok=True)
    articles = make_articles(rng, 60)

    with (DATA / "toy_corpus.jsonl").open("w", encoding="utf-8") as fh:
        for art in articles:
            rec = {k: v for k, v in art.items() if not k.startswith("_")}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    # Per-article NER fixture: the entities actually used by the article,
    # with deterministic relevance values.
    tag_of = dict(ENTITIES)
    ner: dict[str, list[dict]] = {}
    for art in articles:
        used = sorted({v for v in art["_slots"].values()})
        ner[art["id"]] = [
            {
                "surface": s,
                "relevance": round(0.5 + 0.5 * ((hash_surface(art["id"], s) % 50) / 49), 3),
                "tag": tag_of[s],
            }
            for s in used
        ]
    (DATA / "ner_fixture.json").write_text(
        json.dumps(ner, ensure_ascii=False, indent=1), encoding="utf-8"
    )

    catalog = [
        {"surface": s, "relevance": round(0.4 + 0.6 * (i % 7) / 6, 3), "tag": t}
        for i, (s, t) in enumerate(ENTITIES)
    ]
    (DATA / "ner_catalog.json").write_text(
        json.dumps(catalog, ensure_ascii=False, indent=1), encoding="utf-8"
    )

    # Relative search volumes per entity, one point every two days.
    volumes = {}
    for i, (surface, _) in enumerate(ENTITIES):
        series = []
        for step in range(50):
            d = date(2024, 1, 29) + timedelta(days=2 * step)
            base = 20 + (i * 7) % 60
            wave = 25 * math.sin(step / 4.0 + i)
            vol = max(0.0, min(100.0, round(base + wave + rng.uniform(-5, 5), 1)))
            series.append({"date": d.isoformat(), "volume": vol})
        volumes[surface] = series
    (DATA / "volumes.json").write_text(
        json.dumps(volumes, ensure_ascii=False, indent=1), encoding="utf-8"
    )

    # Embeddings for every word that occurs in a toy title.
    words: set[str] = set()
    for art in articles:
        for raw in art["title"].lower().split():
            word = raw.strip(".,;:!?\"'()")
            if word:
                words.add(word)
    dim = 16
    lines = [f"{len(words)} {dim}"]
    for word in sorted(words):
        wrng = random.Random(f"emb:{word}")
        vec = [wrng.gauss(0, 1) for _ in range(dim)]
        norm = math.sqrt(sum(x * x for x in vec))
        lines.append(word + " " + " ".join(f"{x / norm:.6f}" for x in vec))
    (DATA / "embeddings.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # Two judges over the first twelve titles.
    with (DATA / "judgements.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["title_id", "judge", "grammar_ok", "false_info", "quality"])
        for art in articles[:12]:
            jrng = random.Random(f"judge:{art['id']}")
            for judge in ("j1", "j2"):
                grammar = 1 if jrng.random() > 0.15 else 0
                false_info = 1 if jrng.random() < 0.2 else 0
                quality = jrng.choice([2, 3, 3, 4, 4, 4, 5, 5])
                writer.writerow([art["id"], judge, grammar, false_info, quality])

    # External keyword scores for a few articles (model bypass path).
    external = {}
    for art in articles[:3]:
        used = sorted({v for v in art["_slots"].values()})
        external[art["id"]] = [
            {"surface": s, "score": round(1.0 - 0.2 * j, 2)} for j, s in enumerate(used)
        ]
    (DATA / "external_scores.json").write_text(
        json.dumps(external, ensure_ascii=False, indent=1), encoding="utf-8"
    )

    print(f"wrote {len(articles)} articles and fixtures to {DATA}")


def hash_surface(article_id: str, surface: str) -> int:
    import hashlib

    h = hashlib.sha256(f"{article_id}:{surface}".encode("utf-8")).hexdigest()
    return int(h[:8], 16)


if __name__ == "__main__":
    main()
