"""Test corpora: a hand-built 50-tweet fixture and a synthetic two-region corpus."""

import json
import random

from geolect.grid import CellId, GridSpec, cell_bounds

GRID = GridSpec()

# Four cells: two around Madrid/Toledo, one in Seville, one in Barcelona.
FIXTURE_CELLS = {
    "mad": CellId(18, 15),
    "tol": CellId(18, 14),
    "sev": CellId(11, 7),
    "bcn": CellId(34, 18),
}

# (cell key, text, lang, lang_prob). Concepts in play: cold, swimming pool,
# aluminum paper. Some rows are noise the pipeline must drop.
FIXTURE_ROWS = [
    ("mad", "Tengo un RESFRIADO horrible", "es", 0.99),
    ("mad", "otra vez con gripe #enfermo", "es", 0.97),
    ("mad", "gripe gripe gripe!!!", "es", 0.95),
    ("mad", "@ana creo que es un resfriado, no una gripe", "es", 0.92),
    ("mad", "me voy a la piscina", "es", 0.91),
    ("mad", "¡¡Piscina!! por fin", "es", 0.88),
    ("mad", "envuelve la comida en papel de aluminio", "es", 0.93),
    ("mad", "papel de aluminio y papel albal, lo mismo", "es", 0.90),
    ("mad", "catarro de verano en la piscina", "es", 0.86),
    ("mad", "qué constipado llevo", "es", 0.84),
    ("mad", "resfriado otra vez 🤧", "es", 0.83),
    ("mad", "la gripe me tiene en casa", "es", 0.96),
    ("mad", "hoy gripe y piscina http://t.co/abc", "es", 0.94),
    ("mad", "gripe", "es", 0.61),
    ("mad", "gripe", "es", 0.60),
    ("mad", "a gripe chegou", "pt", 0.99),
    ("tol", "resfriado", "es", 0.90),
    ("tol", "menudo resfriado", "es", 0.91),
    ("tol", "resfriado y catarro, todo junto", "es", 0.92),
    ("tol", "alberca llena", "es", 0.93),
    ("tol", "nos bañamos en la alberca", "es", 0.89),
    ("tol", "piscina municipal abierta", "es", 0.87),
    ("tol", "papel albal para el horno", "es", 0.88),
    ("tol", "nada que ver aquí", "es", 0.99),
    ("tol", "resfriado #lunes", "es", 0.95),
    ("tol", "#resfriado sin más", "es", 0.95),
    ("sev", "vaya catarro tengo", "es", 0.97),
    ("sev", "catarro catarro", "es", 0.93),
    ("sev", "un catarro de los buenos", "es", 0.91),
    ("sev", "gripe en casa", "es", 0.90),
    ("sev", "a la piscina que hace calor", "es", 0.98),
    ("sev", "piscina y siesta", "es", 0.96),
    ("sev", "alberca no, piscina", "es", 0.95),
    ("sev", "papel de plata para la merienda", "es", 0.92),
    ("sev", "papel de plata, siempre", "es", 0.92),
    ("sev", "catarro", "es", 0.40),
    ("bcn", "tinc la grip", "ca", 0.95),
    ("bcn", "constipado total", "es", 0.88),
    ("bcn", "estoy constipado", "es", 0.89),
    ("bcn", "constipado y con gripe", "es", 0.90),
    ("bcn", "constipado", "es", 0.91),
    ("bcn", "la piscina del hotel", "es", 0.92),
    ("bcn", "piscina", "es", 0.93),
    ("bcn", "papel de aluminio", "es", 0.94),
    ("bcn", "papel de aluminio para todo", "es", 0.95),
    ("bcn", "papel albal", "es", 0.96),
    ("bcn", "catarro", "es", 0.97),
    ("bcn", "gripe", "es", 0.98),
    ("bcn", "¿RESFRIADO? no, constipado", "es", 0.99),
    ("bcn", "piscina, piscina, piscina", "es", 0.99),
]
assert len(FIXTURE_ROWS) == 50

FIXTURE_CONCEPTS = ("cold", "swimming pool", "aluminum paper")


def _point_in(cell, k, n):
    """Deterministic interior point of ``cell``; no point ever lies on an edge."""
    x0, y0, x1, y1 = cell_bounds(GRID, cell)
    fx = (k % 7 + 1) / 8.0
    fy = (k % 5 + 1) / 6.0
    return round(x0 + fx * (x1 - x0), 6), round(y0 + fy * (y1 - y0), 6)


def fixture_records():
    out = []
    for k, (key, text, lang, prob) in enumerate(FIXTURE_ROWS):
        lon, lat = _point_in(FIXTURE_CELLS[key], k, len(FIXTURE_ROWS))
        out.append({"id": f"t{k:03d}", "lon": lon, "lat": lat, "text": text,
                    "lang": lang, "lang_prob": prob})
    return out


def write_jsonl(path, records, extra_lines=()):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
        for line in extra_lines:
            fh.write(line + "\n")
    return path


# -- two-region synthetic corpus -------------------------------------------------------

REGION_A = [CellId(4, 10), CellId(4, 11), CellId(5, 10), CellId(5, 11)]
REGION_B = [CellId(30, 10), CellId(30, 11), CellId(31, 10), CellId(31, 11)]

# concept -> (variant preferred in region A, variant preferred in region B)
SYNTHETIC_CONCEPTS = {
    "cold": ("resfriado", "constipado"),
    "swimming pool": ("piscina", "alberca"),
    "car": ("coche", "carro"),
    "glasses": ("gafas", "lentes"),
    "aluminum paper": ("papel de aluminio", "papel albal"),
}


def two_region_records(per_region=200, preference=0.8, seed=7):
    """Tweets from two regions that favor opposite variants of five concepts.

    Each region gets ``per_region`` tweets spread round-robin over its cells
    and concepts; a tweet uses its region's preferred variant with
    probability ``preference``.
    """
    rng = random.Random(seed)
    concepts = list(SYNTHETIC_CONCEPTS)
    out = []
    for region, cells in ((0, REGION_A), (1, REGION_B)):
        for k in range(per_region):
            cell = cells[k % len(cells)]
            concept = concepts[(k // len(cells)) % len(concepts)]
            favored = SYNTHETIC_CONCEPTS[concept][region]
            other = SYNTHETIC_CONCEPTS[concept][1 - region]
            variant = favored if rng.random() < preference else other
            lon, lat = _point_in(cell, k, per_region)
            out.append({"id": f"r{region}-{k}", "lon": lon, "lat": lat,
                        "text": f"ayer hablamos de {variant} otra vez",
                        "lang": "es", "lang_prob": 0.95})
    return out
