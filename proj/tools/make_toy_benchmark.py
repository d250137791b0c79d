#!/usr/bin/env python3
"""Generates data/toy_hotpot.json, the bundled 36-instance benchmark.

The corpus is a small invented world (countries, capitals, scholars) so that
answers are short spans, passages overlap in vocabulary, and retrieval quality
actually depends on chunking and top-k. Deterministic: fixed seed, stable
ordering. Run from the repository root:

    python3 tools/make_toy_benchmark.py
"""

import json
import random
from pathlib import Path

COUNTRIES = [
    # name, capital, river, mountain, dish
    ("Veldoria", "Arvem", "Tal", "Sorel", "saffron stew"),
    ("Branthia", "Quorell", "Miren", "Dahl", "barley cakes"),
    ("Ostrevia", "Kandor", "Velt", "Rhun", "smoked eel"),
    ("Luminara", "Perissa", "Osk", "Cinder", "honey bread"),
    ("Tarvosia", "Melchin", "Drave", "Karrow", "pepper broth"),
    ("Quindrel", "Sarvok", "Ilmen", "Vastra", "plum dumplings"),
    ("Ferrowyn", "Caldis", "Brenn", "Ashfall", "juniper roast"),
    ("Solverra", "Tremon", "Lira", "Glasspeak", "almond curd"),
    ("Norvaine", "Eshta", "Koll", "Winterhorn", "rye porridge"),
    ("Azmirith", "Polvane", "Senna", "Duskspire", "fig terrine"),
    ("Caldrune", "Yorvel", "Harn", "Stormcrag", "chestnut pie"),
    ("Embrevia", "Lusket", "Fenn", "Greymantle", "cider ham"),
]

SCHOLARS = [
    # name, book; birthplace is the capital of the country at the same index
    ("Mira Kessel", "Atlas of Tides"),
    ("Doran Velt", "Chronicle of Glass"),
    ("Ilsa Maren", "Book of Quiet Rivers"),
    ("Tobin Ashe", "Ledger of Storms"),
    ("Senna Holt", "Garden of Cartography"),
    ("Priya Voss", "Lexicon of Ash"),
    ("Corin Drael", "Treatise on Lanterns"),
    ("Yeva Lanric", "Catalogue of Winds"),
    ("Oskar Brund", "Herbal of the North"),
    ("Anouk Tirell", "Register of Bells"),
    ("Felix Morrow", "Survey of Salt Roads"),
    ("Greta Palun", "Annals of the Ferry"),
]

FILLERS = [
    "Merchants travel the old salt road each spring.",
    "Lantern festivals mark the turn of every season.",
    "The harbor bells ring twice at dusk.",
    "Ferries carry grain and timber between the towns.",
    "Stonemasons still quarry pale granite in the hills.",
    "Weavers trade dyed wool at the open market.",
    "The archive keeps maps drawn on pressed bark.",
    "Shepherds drive their flocks down before the frost.",
    "Copper kettles hang in every roadside inn.",
    "The night watch lights beacons along the walls.",
    "Printing presses arrived late to the inland valleys.",
    "Glassblowers shape bottles for the cider trade.",
    "The toll bridge closes when the river runs high.",
    "Orchards line the terraces above the lower town.",
    "Pilgrims rest at the white chapel on the ridge.",
    "Cartwrights mend axles at the edge of the square.",
]

ALMANAC = (
    "World Almanac",
    [
        "The almanac records harvests, tides, and roads for every province.",
        "Scribes revise the almanac after each harvest moon.",
        "Its tables list ferry tolls, market days, and beacon schedules.",
        "Travelers consult the almanac before crossing the high passes.",
        "Most entries are checked against the provincial registers.",
        "The oldest copies are kept under glass in the Grand Archive.",
    ],
)

# Shared "hard distractor" passages: dense in question vocabulary (capital,
# wrote, born) without containing any gold answer, so they compete for
# retrieval rank and punish very small top-k.
GAZETTEER = (
    "Gazetteer of Capitals",
    [
        "The gazetteer names the capital of every republic in the west.",
        "Each capital entry lists gates, wells, and granaries.",
        "A capital is marked on the charts with a ringed star.",
        "Surveyors measure roads outward from each capital milestone.",
        "No chronicler agrees which city was capital of the old empire.",
        "Disputed capital claims are struck from the gazetteer.",
        "The capital tables are redrawn after every census.",
    ],
)

REGISTER = (
    "Library Register",
    [
        "The register records who wrote each atlas, ledger, and chronicle.",
        "Clerks note where every author was born and where they lectured.",
        "Unsigned books are shelved until a scribe proves who wrote them.",
        "The register of authors fills nine bound volumes.",
        "Forgotten names are restored when letters surface.",
        "Each entry notes the city where the writer was born.",
    ],
)


def capital_fact(i):
    # phrasing variants so a span extractor cannot score perfectly everywhere
    name, capital = COUNTRIES[i][0], COUNTRIES[i][1]
    variants = [
        f"{capital} is the capital of {name}.",
        f"Today {capital} is the capital of {name}.",
        f"{capital} became the capital of {name} after the river wars.",
    ]
    return variants[i % 3]


def country_passage(i, rng):
    name, capital, river, mountain, dish = COUNTRIES[i]
    neighbor_a = COUNTRIES[(i + 1) % len(COUNTRIES)][0]
    neighbor_b = COUNTRIES[(i + 5) % len(COUNTRIES)][0]
    sentences = [
        f"The republic of {name} lies along the river {river}.",
        capital_fact(i),
        f"The city of {capital} grew around a stone bridge over the {river}.",
        f"Mount {mountain} rises to the north of {capital}.",
        f"Farmers in {name} are known for their {dish}.",
        f"Trade caravans from {name} cross into {neighbor_a} beyond the {river}.",
        f"Scholars compare the granaries of {name} with those of {neighbor_b}.",
        f"The council of {name} meets in the old granary of {capital}.",
        f"Snow from Mount {mountain} feeds the {river} every spring.",
    ]
    sentences += rng.sample(FILLERS, 15)
    rng.shuffle(sentences)
    # keep the headline fact away from position 0 so chunk summaries
    # (first sentences) differ from the answers
    if "capital of" in sentences[0]:
        sentences[0], sentences[3] = sentences[3], sentences[0]
    return (name, sentences)


def author_fact(i):
    name, book = SCHOLARS[i]
    variants = [
        f"{name} wrote the {book}.",
        f"{name} wrote and illustrated the {book}.",
        f"It is known that {name} wrote the {book} during the long winters.",
    ]
    return variants[i % 3]


def birth_fact(i):
    name = SCHOLARS[i][0]
    birthplace = COUNTRIES[i][1]
    variants = [
        f"{name} was born in {birthplace}.",
        f"{name} was born near the old bridge of {birthplace}.",
        f"Records say {name} was born one stormy night in {birthplace}.",
    ]
    return variants[i % 3]


def scholar_passage(i, rng):
    name, book = SCHOLARS[i]
    birthplace = COUNTRIES[i][1]
    country = COUNTRIES[i][0]
    rival = SCHOLARS[(i + 4) % len(SCHOLARS)][0]
    sentences = [
        birth_fact(i),
        author_fact(i),
        f"The {book} survives in three copies.",
        f"{name} lectured at the academy of {birthplace} for many years.",
        f"Scholars of {country} still debate the margins of the {book}.",
        f"{name} exchanged long letters with {rival}.",
        f"{name} catalogued ferries, wells, and toll roads.",
    ]
    sentences += rng.sample(FILLERS, 11)
    rng.shuffle(sentences)
    if " was born " in sentences[0] or " wrote " in sentences[0]:
        sentences[0], sentences[2] = sentences[2], sentences[0]
    return (name, sentences)


def main():
    rng = random.Random(20240817)
    countries = [country_passage(i, rng) for i in range(len(COUNTRIES))]
    scholars = [scholar_passage(i, rng) for i in range(len(SCHOLARS))]

    def notes_passage(instance_index):
        # one passage unique to this instance, so train/test corpora differ
        seal = f"zq{instance_index:02d}x"
        return (
            f"Clerk Notes {seal}",
            [
                f"The provincial clerk filed these notes under seal {seal}.",
                "Couriers copy such notes each winter.",
                "Smudged pages are recopied by candlelight.",
                f"Seal {seal} hangs from a green ribbon.",
            ],
        )

    instance_counter = [0]

    def build_context(gold, distract_pool):
        picks = rng.sample(distract_pool, 2)
        context = [[title, list(sentences)] for title, sentences in gold + picks]
        for shared in (ALMANAC, GAZETTEER, REGISTER):
            context.append([shared[0], list(shared[1])])
        notes = notes_passage(instance_counter[0])
        instance_counter[0] += 1
        context.append([notes[0], list(notes[1])])
        rng.shuffle(context)
        return context

    instances = []

    for i, (name, capital, _river, _mountain, _dish) in enumerate(COUNTRIES):
        others = [countries[j] for j in range(len(countries)) if j != i]
        instances.append(
            {
                "_id": f"toy-capital-{i:02d}",
                "question": f"What is the capital of {name}?",
                "answer": capital,
                "context": build_context([countries[i], scholars[i]], others),
            }
        )

    for i, (sname, book) in enumerate(SCHOLARS):
        others = [scholars[j] for j in range(len(scholars)) if j != i]
        instances.append(
            {
                "_id": f"toy-author-{i:02d}",
                "question": f"Who wrote the {book}?",
                "answer": sname,
                "context": build_context([scholars[i], countries[i]], others),
            }
        )

    for i, (sname, _book) in enumerate(SCHOLARS):
        birthplace = COUNTRIES[i][1]
        others = [countries[j] for j in range(len(countries)) if j != i]
        instances.append(
            {
                "_id": f"toy-birth-{i:02d}",
                "question": f"In which city was {sname} born?",
                "answer": birthplace,
                "context": build_context([scholars[i], countries[i]], others),
            }
        )

    out = Path(__file__).resolve().parent.parent / "data" / "toy_hotpot.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as f:
        json.dump(instances, f, indent=1)
        f.write("\n")
    print(f"wrote {len(instances)} instances to {out}")


if __name__ == "__main__":
    main()
