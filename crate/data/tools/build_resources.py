#!/usr/bin/env python3
"""Builds the derived parts of the bundled resource pack.

Hand-authored inputs:
  data/tools/wordlists/*          verb, noun, adjective and function-word lists
  data/resources/verb_irregular.tsv, glosses.tsv, names.tsv, stopwords.txt

Derived outputs (all deterministic for a fixed seed):
  data/resources/verbs.txt
  data/resources/lemma_exceptions.tsv
  data/resources/pos_lexicon.tsv
  data/resources/gazetteer.tsv
  data/corpus/lm_corpus.txt       template-generated general English corpus
  data/resources/embeddings.txt   PPMI + truncated SVD vectors over corpus and glosses

Usage: python3 data/tools/build_resources.py [--sentences 50000] [--dim 300]
"""

import argparse
import math
import random
import re
from collections import Counter, defaultdict
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import svds

ROOT = Path(__file__).resolve().parents[2]
WORDLISTS = ROOT / "data" / "tools" / "wordlists"
RES = ROOT / "data" / "resources"
CORPUS = ROOT / "data" / "corpus"

# Verbs whose final consonant doubles before -ed/-ing despite having more than one
# vowel group. Mirrored by the Rust inflector.
DOUBLING = {
    "admit", "refer", "occur", "prefer", "control", "commit", "permit", "equip",
    "regret", "compel", "transfer", "submit", "omit", "patrol", "propel", "expel",
}

# Words listed as both noun and verb whose first (dominant) tag is the noun reading.
NOUN_FIRST = {
    "base", "book", "date", "feature", "film", "head", "house", "mark", "match", "name",
    "place", "post", "race", "rank", "rate", "record", "release", "rule", "sale", "score",
    "share", "side", "stage", "star", "station", "title", "top", "tour", "trade", "train",
    "vote", "work", "award", "building", "painting", "opening", "meeting", "design", "form",
    "report", "research", "review", "order", "point", "end", "face", "list", "land", "line",
    "model", "interest", "control", "concern", "charge", "change", "case", "coach", "copy",
    "count", "cover", "damage", "doubt", "estimate", "function", "guess", "hope", "host",
    "influence", "judge", "kick", "laugh", "limit", "link", "love", "measure", "murder",
    "need", "note", "notice", "offer", "plan", "plant", "play", "present", "press", "print",
    "promise", "rain", "rest", "return", "ski", "smile", "sound", "start", "study", "support",
    "talk", "target", "test", "touch", "travel", "turn", "use", "visit", "wait", "walk",
    "wish", "worry", "dance", "cycle", "campaign", "block", "attack", "answer", "check",
    "contest", "total", "stand", "run", "set", "fall", "hit", "cut", "light", "lead",
    "deal", "ring", "rise", "shot", "show", "split", "spread", "cost", "bet", "bite",
    "blow", "tear", "swing", "state", "party", "model", "part", "age",
}

MONTHS = ["January", "February", "March", "April", "May", "June", "July", "August",
          "September", "October", "November", "December"]


def read_list(path):
    return [l.strip() for l in path.read_text().splitlines() if l.strip() and not l.startswith("#")]


def read_tsv(path):
    return [l.split("\t") for l in path.read_text().splitlines() if l.strip() and not l.startswith("#")]


# ---------------------------------------------------------------- morphology

VOWELS = set("aeiou")


def vowel_groups(word):
    return len(re.findall(r"[aeiou]+", word))


def doubles(word):
    if len(word) < 3:
        return False
    a, b, c = word[-3], word[-2], word[-1]
    cvc = a not in VOWELS and b in VOWELS and c not in VOWELS and c not in "wxy"
    return cvc and (vowel_groups(word) == 1 or word in DOUBLING)


def third_singular(v):
    if re.search(r"(s|x|z|ch|sh|o)$", v):
        return v + "es"
    if re.search(r"[^aeiou]y$", v):
        return v[:-1] + "ies"
    return v + "s"


def past(v):
    if v.endswith("e"):
        return v + "d"
    if re.search(r"[^aeiou]y$", v):
        return v[:-1] + "ied"
    if doubles(v):
        return v + v[-1] + "ed"
    return v + "ed"


def gerund(v):
    if v.endswith("ie"):
        return v[:-2] + "ying"
    if v.endswith("e") and not v.endswith("ee") and v != "be":
        return v[:-1] + "ing"
    if doubles(v):
        return v + v[-1] + "ing"
    return v + "ing"


def plural(n):
    if re.search(r"(s|x|z|ch|sh)$", n):
        return n + "es"
    if re.search(r"[^aeiou]y$", n):
        return n[:-1] + "ies"
    return n + "s"


VERB_RULES = [("s", ""), ("ies", "y"), ("es", "e"), ("es", ""), ("ed", "e"), ("ed", ""),
              ("ied", "y"), ("ing", "e"), ("ing", "")]
NOUN_RULES = [("s", ""), ("ses", "s"), ("xes", "x"), ("zes", "z"), ("ches", "ch"),
              ("shes", "sh"), ("men", "man"), ("ies", "y")]


def rule_lemma(word, rules, known):
    """Mirror of the Rust rule path (exceptions excluded)."""
    if word in known:
        return word
    for suffix, repl in rules:
        if word.endswith(suffix) and len(word) > len(suffix):
            cand = word[: len(word) - len(suffix)] + repl
            if cand in known:
                return cand
    for suffix in ("ed", "ing"):
        if word.endswith(suffix):
            stem = word[: -len(suffix)]
            if len(stem) >= 2 and stem[-1] == stem[-2] and stem[:-1] in known:
                return stem[:-1]
    return word


# ---------------------------------------------------------------- lexicons

def build_lexicons():
    regular = read_list(WORDLISTS / "verbs_regular.txt")
    irregular = {row[0]: row[1:] for row in read_tsv(RES / "verb_irregular.tsv")}
    verbs = sorted(set(regular) | set(irregular))

    forms = {}
    for v in verbs:
        if v in irregular:
            p, pp, s3 = irregular[v]
            forms[v] = {"VBZ": s3, "VBD": p, "VBN": pp, "VBG": gerund(v)}
        else:
            forms[v] = {"VBZ": third_singular(v), "VBD": past(v), "VBN": past(v), "VBG": gerund(v)}
    forms["be"]["VBG"] = "being"

    verbset = set(verbs)
    exceptions = []
    dropped = []
    for v in verbs:
        for tag, f in forms[v].items():
            if f == v:
                continue
            if f in verbset:
                # an inflected form that is itself a lemma would break idempotence
                dropped.append((f, v))
                continue
            if rule_lemma(f, VERB_RULES, verbset) != v:
                exceptions.append((f, "VERB", v))
    for extra in ("am", "are", "were"):
        exceptions.append((extra, "VERB", "be"))

    nouns = read_list(WORDLISTS / "nouns.txt")
    noun_irr = {row[0]: row[1] for row in read_tsv(WORDLISTS / "nouns_irregular.tsv")}
    nounset = set(nouns) | set(noun_irr)
    noun_plurals = {}
    for n in sorted(nounset):
        pl = noun_irr.get(n, plural(n))
        noun_plurals[n] = pl
        if pl != n and rule_lemma(pl, NOUN_RULES, nounset) != n:
            exceptions.append((pl, "NOUN", n))

    exceptions = sorted(set(exceptions))

    # pos lexicon: word -> ordered tag list
    tags = defaultdict(list)

    def add(word, tag):
        if tag not in tags[word]:
            tags[word].append(tag)

    for row in read_tsv(WORDLISTS / "function_words.tsv"):
        for t in row[1].split(","):
            add(row[0], t)
    for n in sorted(nounset):
        add(n, "NN")
        if noun_plurals[n] != n:
            add(noun_plurals[n], "NNS")
    for v in verbs:
        f = forms[v]
        add(v, "VB")
        add(v, "VBP")
        add(f["VBZ"], "VBZ")
        add(f["VBD"], "VBD")
        add(f["VBN"], "VBN")
        add(f["VBG"], "VBG")
    for a in read_list(WORDLISTS / "adjectives.txt"):
        add(a, "JJ")
    # participles that behave as adjectives in table headers come VBN-first
    for w in ("born", "located", "situated", "known", "based", "named"):
        tags[w] = ["VBN"] + [t for t in tags[w] if t != "VBN"]
    for w in ("is",):
        tags[w] = ["VBZ"]
    # dominant-noun readings first
    for w, ts in tags.items():
        if w in NOUN_FIRST and any(t.startswith("NN") for t in ts):
            tags[w] = sorted(ts, key=lambda t: 0 if t.startswith("NN") else 1)
        elif w.endswith("ing") and "NN" in ts:
            tags[w] = sorted(ts, key=lambda t: 0 if t == "NN" else 1)
    for m in MONTHS:
        tags[m.lower()] = ["NNP"]

    with open(RES / "verbs.txt", "w") as fh:
        fh.write("".join(v + "\n" for v in verbs))
    with open(RES / "lemma_exceptions.tsv", "w") as fh:
        fh.write("# surface\tpos\tlemma\n")
        for s, p, l in exceptions:
            fh.write(f"{s}\t{p}\t{l}\n")
    with open(RES / "pos_lexicon.tsv", "w") as fh:
        fh.write("# word\tranked PENN tags\n")
        for w in sorted(tags):
            fh.write(f"{w}\t{','.join(tags[w])}\n")
    return verbs, forms, nouns, noun_plurals, dropped


# ---------------------------------------------------------------- gazetteer and fillers

SURNAMES = """Adams Allen Anderson Baker Barnes Bell Bennett Brooks Brown Campbell Carter Clark Collins
Cook Cooper Cox Davies Davis Dixon Edwards Evans Fischer Fisher Ford Foster Garcia Gibson Gonzalez Graham
Gray Green Hall Harris Hayes Hill Hoffmann Howard Hughes Hunt Jackson James Jenkins Johnson Jones Kelly
Kennedy King Klein Koch Lee Lewis Lopez Marshall Martinez Mason Meyer Miller Mitchell Moore Morgan Morris
Murphy Murray Nelson Novak Owen Palmer Parker Perez Peterson Phillips Powell Price Reed Reyes Richards
Richardson Roberts Robinson Rodriguez Rogers Ross Russo Sanchez Schmidt Schneider Scott Shaw Simpson
Smith Stewart Sullivan Taylor Thompson Turner Walker Wallace Ward Watson Weber Wells White Wilson Wood
Wright Young Rossi Ferrari Bianchi Romano Kowalski Nowak Petrov Ivanov Tanaka Suzuki Sato Kim Park Chen
Wang Li Zhang Singh Kumar Sharma Otieno Kamau Mwangi Okafor Mensah Silva Santos Pereira Costa Larsen
Hansen Nielsen Jensen Berg Lindqvist""".split()

COUNTRIES = """Germany France Italy Spain Portugal Poland Denmark Sweden Norway Finland Austria Switzerland
Belgium Netherlands Ireland England Scotland Wales Greece Turkey Russia Ukraine Hungary Romania Bulgaria
Serbia Croatia Canada Mexico Brazil Argentina Chile Peru Colombia Jamaica Cuba Kenya Nigeria Ghana Egypt
Morocco Ethiopia India China Japan Pakistan Indonesia Vietnam Thailand Australia Israel Iran Iraq""".split()
COUNTRIES += ["United States", "United Kingdom", "New Zealand", "South Africa", "South Korea", "Czech Republic"]

CITIES = {
    "Germany": ["Berlin", "Munich", "Hamburg", "Cologne", "Frankfurt", "Stuttgart", "Leipzig", "Dresden", "Bonn", "Mainz", "Wiesbaden"],
    "France": ["Paris", "Lyon", "Marseille", "Nice", "Toulouse", "Bordeaux"],
    "Italy": ["Rome", "Milan", "Naples", "Turin", "Florence", "Venice", "Bologna"],
    "Spain": ["Madrid", "Barcelona", "Seville", "Valencia"],
    "Poland": ["Krakow", "Gdansk", "Lodz", "Poznan"],
    "Denmark": ["Aarhus", "Odense"],
    "Sweden": ["Stockholm", "Uppsala", "Gothenburg"],
    "Austria": ["Vienna", "Salzburg", "Graz"],
    "United States": ["New York", "Boston", "Chicago", "Princeton", "Seattle", "Denver", "Atlanta"],
    "United Kingdom": ["London", "Manchester", "Oxford", "Cambridge", "Liverpool", "Leeds"],
    "Canada": ["Toronto", "Montreal", "Vancouver"],
    "Kenya": ["Nairobi", "Mombasa", "Eldoret"],
    "Japan": ["Tokyo", "Osaka", "Kyoto"],
    "India": ["Mumbai", "Delhi", "Chennai"],
    "Brazil": ["Rio", "Recife", "Salvador"],
    "Russia": ["Moscow", "Kazan"],
    "Netherlands": ["Amsterdam", "Rotterdam", "Utrecht"],
    "Switzerland": ["Zurich", "Geneva", "Basel", "Bern"],
}

REGIONS = ["Bavaria", "Hesse", "Saxony", "Tuscany", "Lombardy", "Catalonia", "Ontario", "Texas",
           "California", "Yorkshire", "Provence", "Silesia", "Jutland", "Florida", "Quebec"]

ORGS = ["Siemens", "Volkswagen", "Bosch", "Fiat", "Nokia", "Philips", "Sony", "Toyota",
        "General Electric", "Deutsche Bahn", "Harvard University", "Oxford University",
        "University of Zurich", "University of Paris", "Princeton University", "Royal Society",
        "Bayern Munich", "Real Madrid", "Juventus", "Ajax", "Manchester United", "Arsenal",
        "United Nations", "European Union", "Red Cross", "Penguin Books", "Random House",
        "Warner Bros", "Columbia Records", "BBC", "Reuters"]
PARTIES_NORP = ["Republican", "Democratic", "Labour", "Conservative", "Liberal", "Socialist",
                "Christian Democratic", "Social Democratic"]
NORP = ["German", "French", "Italian", "American", "British", "Kenyan", "Japanese", "Polish",
        "Danish", "Swedish", "Chinese", "Indian", "Jamaican", "Korean"]
EVENTS = ["World Cup", "Olympic Games", "Winter Olympics", "Tour de France", "Wimbledon",
          "World Championships", "Commonwealth Games", "Second World War", "First World War"]
WORKS = ["The Silence of the Lambs", "War and Peace", "The Great Gatsby", "Moby Dick",
         "The Old Man and the Sea", "Brave New World", "A Tale of Two Cities", "The Trial",
         "Don Quixote", "The Magic Mountain", "The Name of the Rose", "The Secret Garden",
         "A Song of Ice and Fire"]
LANGUAGES = ["English", "French", "German", "Italian", "Spanish", "Polish", "Danish", "Japanese",
             "Swahili", "Russian", "Portuguese", "Dutch"]
BENCH_PEOPLE = ["Albert Einstein", "Marie Curie", "Pierre Curie", "Niels Bohr", "Elsa Lowenthal",
                "Melania Corradini", "Esther Ndiema", "Usain Bolt", "Jane Austen", "George Martin",
                "John Tolkien", "Tony Blair", "Michael Jordan"]
BENCH_PLACES = ["Ulm, Germany", "Warsaw, Poland", "Copenhagen, Denmark", "Ulm", "Warsaw", "Copenhagen",
                "Hesse", "Wiesbaden"]
BENCH_WORKS = ["A Game of Thrones", "Pride and Prejudice", "The Hobbit"]


def write_gazetteer():
    rows = {}

    def put(s, t):
        rows.setdefault(s, t)

    for p in BENCH_PEOPLE:
        put(p, "PERSON")
    for s in BENCH_PLACES:
        put(s, "GPE")
    for c in COUNTRIES:
        put(c, "GPE")
    for cs in CITIES.values():
        for c in cs:
            put(c, "GPE")
    for country, cs in sorted(CITIES.items()):
        for c in cs:
            put(f"{c}, {country}", "GPE")
    for r in REGIONS:
        put(r, "GPE")
    for o in ORGS:
        put(o, "ORG")
    for p in PARTIES_NORP + NORP:
        put(p, "NORP")
    for e in EVENTS:
        put(e, "EVENT")
    for w in WORKS + BENCH_WORKS:
        put(w, "WORK_OF_ART")
    for l in LANGUAGES:
        put(l, "LANGUAGE")
    put("Nobel Prize", "WORK_OF_ART")
    put("Rhine", "LOC")
    put("Danube", "LOC")
    put("Alps", "LOC")
    with open(RES / "gazetteer.tsv", "w") as fh:
        fh.write("# surface\tNE tag\n")
        for s in sorted(rows):
            fh.write(f"{s}\t{rows[s]}\n")


# ---------------------------------------------------------------- corpus

class Filler:
    def __init__(self, rng):
        self.rng = rng
        names = read_tsv(RES / "names.tsv")
        self.male = [n for n, g in names if g == "m"]
        self.female = [n for n, g in names if g == "f"]

    def pick(self, xs):
        return self.rng.choice(xs)

    def person(self, gender=None):
        g = gender or self.rng.choice("mf")
        first = self.pick(self.male if g == "m" else self.female)
        return f"{first} {self.pick(SURNAMES)}", g

    def city(self):
        country = self.pick(sorted(CITIES))
        return self.pick(CITIES[country]), country

    def place(self):
        r = self.rng.random()
        if r < 0.45:
            c, k = self.city()
            return f"{c}, {k}"
        if r < 0.75:
            return self.city()[0]
        if r < 0.9:
            return self.pick(COUNTRIES)
        return self.pick(REGIONS)

    def date(self):
        r = self.rng.random()
        year = self.rng.randint(1800, 2020)
        if r < 0.55:
            return f"{self.rng.randint(1, 28)} {self.pick(MONTHS)} {year}"
        if r < 0.7:
            return f"{self.pick(MONTHS)} {self.rng.randint(1, 28)}, {year}"
        return str(year)

    def year(self):
        return str(self.rng.randint(1800, 2020))

    def number(self):
        r = self.rng.random()
        if r < 0.5:
            return str(self.rng.randint(0, 12))
        if r < 0.8:
            return str(self.rng.randint(13, 999))
        return f"{self.rng.randint(1, 99)},{self.rng.randint(0, 999):03d}"

    def small(self):
        return str(self.rng.randint(1, 10))


SPORTS = ["football", "tennis", "hockey", "basketball", "cricket", "chess", "golf", "rugby",
          "baseball", "volleyball", "badminton", "skiing", "cycling"]
SUBJECTS = ["physics", "chemistry", "mathematics", "medicine", "law", "history", "music",
            "philosophy", "biology", "economics", "literature", "engineering"]
GENRES = ["fantasy", "romance", "crime", "science fiction", "poetry", "drama", "history",
          "comedy", "horror", "mystery", "thriller", "adventure"]
BUILDINGS = ["station building", "through station", "halt", "church", "museum", "hotel",
             "tower", "bridge", "castle", "stadium", "library", "hospital", "school", "hall"]
JOBS = ["teacher", "doctor", "lawyer", "engineer", "physicist", "writer", "painter", "singer",
        "actor", "actress", "architect", "journalist", "composer", "scientist", "coach", "player",
        "model", "nurse", "farmer", "soldier"]
MEDAL = ["gold", "silver", "bronze"]
TITLE_WORDS = ["Night", "River", "Silence", "Garden", "Winter", "Stone", "Fire", "Ice", "Kings",
               "Shadow", "Song", "Sea", "Glass", "Crown", "Storm", "Wind", "House", "Road"]


def sentences(rng, n):
    f = Filler(rng)

    def per():
        return f.person()[0]

    def title():
        r = rng.random()
        if r < 0.3:
            return rng.choice(WORKS)
        if r < 0.65:
            return f"The {rng.choice(TITLE_WORDS)} of {rng.choice(TITLE_WORDS)}"
        return f"A {rng.choice(TITLE_WORDS)} of {rng.choice(TITLE_WORDS)}"

    def pro(g, case="subj"):
        table = {"m": {"subj": "He", "obj": "him", "poss": "His", "possl": "his"},
                 "f": {"subj": "She", "obj": "her", "poss": "Her", "possl": "her"}}
        return table[g][case]

    def team():
        return rng.choice(ORGS[16:22] + COUNTRIES)

    templates = []

    def t(weight):
        def deco(fn):
            templates.append((weight, fn))
            return fn
        return deco

    # --- biography
    @t(14)
    def _():
        return f"{per()} was born in {f.place()}."

    @t(6)
    def _():
        return f"{per()} was born on {f.date()}."

    @t(5)
    def _():
        return f"{per()} was born in {f.place()} on {f.date()}."

    @t(4)
    def _():
        p, g = f.person()
        return f"{pro(g)} was born in {f.place()} and died in {f.place()}."

    @t(5)
    def _():
        return f"{per()} died in {f.place()} in {f.year()}."

    @t(3)
    def _():
        return f"{per()} died on {f.date()}."

    @t(5)
    def _():
        p, g = f.person("m")
        return f"{f.person('f')[0]} is the wife of {p}."

    @t(4)
    def _():
        return f"{f.person('m')[0]} is the husband of {f.person('f')[0]}."

    @t(3)
    def _():
        return f"{per()} is the spouse of {per()}."

    @t(3)
    def _():
        return f"{per()} was the spouse of {per()}."

    @t(4)
    def _():
        p, g = f.person()
        return f"{p} married {per()} in {f.year()}."

    @t(3)
    def _():
        p, g = f.person()
        return f"{pro(g)} married {per()}."

    @t(3)
    def _():
        p, g = f.person("m")
        return f"{p}'s wife was {f.person('f')[0]}."

    @t(2)
    def _():
        p, g = f.person()
        return f"{pro(g, 'poss')} spouse is {per()}."

    @t(3)
    def _():
        p, g = f.person()
        return f"{pro(g)} has a daughter and a son."

    @t(3)
    def _():
        p, g = f.person()
        return f"{pro(g, 'poss')} birthday is on {f.date()}."

    @t(2)
    def _():
        p, g = f.person()
        return f"{p} celebrated {pro(g, 'possl')} birthday on {f.date()}."

    @t(2)
    def _():
        p, g = f.person()
        return f"{p} has birthday on {f.date()}."

    @t(2)
    def _():
        return f"The date of birth of {per()} is {f.date()}."

    @t(5)
    def _():
        p, g = f.person()
        return f"{p} studied {rng.choice(SUBJECTS)} at {rng.choice(ORGS[10:15])}."

    @t(5)
    def _():
        p, g = f.person()
        return f"{p} worked as a {rng.choice(JOBS)} in {f.place()}."

    @t(4)
    def _():
        p, g = f.person()
        return f"{pro(g)} was a {rng.choice(JOBS)} and a {rng.choice(JOBS)}."

    @t(3)
    def _():
        return f"{per()} won the Nobel Prize in {rng.choice(SUBJECTS)} in {f.year()}."

    @t(3)
    def _():
        p, g = f.person()
        return f"{pro(g)} received an award for {pro(g, 'possl')} work in {rng.choice(SUBJECTS)}."

    @t(3)
    def _():
        return f"{per()} lived in {f.place()} for {f.small()} years."

    @t(2)
    def _():
        return f"{per()} moved to {f.place()} in {f.year()}."

    @t(2)
    def _():
        return f"The nationality of {per()} is {rng.choice(NORP)}."

    @t(2)
    def _():
        p, g = f.person()
        return f"{p}'s nationality is {rng.choice(NORP)}."

    @t(2)
    def _():
        p, g = f.person()
        return f"{pro(g)} is a {rng.choice(NORP)} {rng.choice(JOBS)}."

    # --- sport
    @t(8)
    def _():
        return f"{per()} played for {team()}."

    @t(4)
    def _():
        p, g = f.person()
        return f"{pro(g)} played for {team()} in the {rng.choice(EVENTS)}."

    @t(4)
    def _():
        return f"{per()} plays {rng.choice(SPORTS)} for {team()}."

    @t(3)
    def _():
        return f"{per()} played {rng.choice(SPORTS)} and {rng.choice(SPORTS)}."

    @t(4)
    def _():
        return f"They played a game of {rng.choice(SPORTS)} in {f.place()}."

    @t(3)
    def _():
        return f"The game was played in {f.place()} on {f.date()}."

    @t(3)
    def _():
        return f"The match was played in the rain and the game lasted {f.small()} hours."

    @t(3)
    def _():
        return f"{team()} won the match against {team()}."

    @t(2)
    def _():
        return f"{team()} played a match against {team()} in {f.year()}."

    @t(2)
    def _():
        return f"The team played well and won the game."

    @t(2)
    def _():
        return f"Children play games in the park."

    @t(4)
    def _():
        p, g = f.person()
        return f"{p} won {f.small()} {rng.choice(MEDAL)} medals."

    @t(3)
    def _():
        return f"{rng.choice(COUNTRIES)} won {f.small()} {rng.choice(MEDAL)} medals at the {rng.choice(EVENTS)}."

    @t(2)
    def _():
        return f"{rng.choice(COUNTRIES)} has won {f.small()} gold medals and {f.small()} silver medals."

    @t(2)
    def _():
        p, g = f.person()
        return f"{pro(g)} won a {rng.choice(MEDAL)} medal in {f.year()}."

    @t(3)
    def _():
        p, g = f.person()
        return f"{p} finished the race with a rank of {f.small()}."

    @t(3)
    def _():
        p, g = f.person()
        return f"{pro(g)} had the rank of {f.small()}."

    @t(2)
    def _():
        p, g = f.person()
        return f"{pro(g, 'poss')} rank is {f.small()}."

    @t(2)
    def _():
        p, g = f.person()
        return f"{p} ranked {f.small()} in the world."

    @t(2)
    def _():
        return f"{per()} ran a distance of {f.small()} km."

    @t(2)
    def _():
        return f"{per()} represented {rng.choice(COUNTRIES)} at the {rng.choice(EVENTS)}."

    @t(2)
    def _():
        return f"{per()} scored {f.small()} goals for {team()}."

    @t(2)
    def _():
        return f"{per()} is the coach of {team()}."

    # --- places and buildings
    @t(5)
    def _():
        c, k = f.city()
        return f"{c} is a city in {k}."

    @t(4)
    def _():
        c, k = f.city()
        return f"{c} is located in {rng.choice([k] + REGIONS)}."

    @t(3)
    def _():
        return f"The {rng.choice(BUILDINGS)} is located at the river."

    @t(4)
    def _():
        return f"The {rng.choice(BUILDINGS)} was opened in {f.year()}."

    @t(3)
    def _():
        return f"The {rng.choice(BUILDINGS)} was built in {f.year()}."

    @t(3)
    def _():
        c, k = f.city()
        return f"The station in {c} was opened in {f.year()}."

    @t(2)
    def _():
        c, k = f.city()
        return f"{c} has a {rng.choice(BUILDINGS)} and a {rng.choice(BUILDINGS)}."

    @t(2)
    def _():
        c, k = f.city()
        return f"The building type of the station is {rng.choice(BUILDINGS)}."

    @t(2)
    def _():
        c, k = f.city()
        return f"{c} has a population of {f.number()}."

    @t(2)
    def _():
        c, k = f.city()
        return f"The population of {c} is {f.number()}."

    @t(2)
    def _():
        c, k = f.city()
        return f"{c} is the capital of {rng.choice(REGIONS)}."

    @t(2)
    def _():
        return f"The {rng.choice(['Rhine', 'Danube'])} flows through {f.city()[0]}."

    @t(2)
    def _():
        return f"The train stopped at the station in {f.city()[0]}."

    @t(1)
    def _():
        return f"It is a type of {rng.choice(BUILDINGS)}."

    # --- organisations and politics
    @t(3)
    def _():
        return f"{rng.choice(ORGS)} was founded in {f.year()}."

    @t(2)
    def _():
        return f"{rng.choice(ORGS)} was founded by {per()}."

    @t(2)
    def _():
        return f"The headquarters of {rng.choice(ORGS)} is in {f.city()[0]}."

    @t(3)
    def _():
        return f"The {rng.choice(PARTIES_NORP)} party has {f.number()} active voters."

    @t(2)
    def _():
        return f"The party won {rng.randint(2, 60)}% of the vote in {f.year()}."

    @t(2)
    def _():
        return f"{rng.choice(PARTIES_NORP)} has a vote share of {rng.randint(2, 60)}%."

    @t(2)
    def _():
        return f"The vote share of the {rng.choice(PARTIES_NORP)} party is {rng.randint(2, 60)}%."

    @t(2)
    def _():
        return f"There were {f.number()} inactive voters in the election."

    @t(2)
    def _():
        return f"{per()} is the leader of the {rng.choice(PARTIES_NORP)} party."

    @t(2)
    def _():
        return f"{per()} was elected president in {f.year()}."

    @t(2)
    def _():
        return f"{per()} was the mayor of {f.city()[0]}."

    # --- works
    @t(5)
    def _():
        return f"{title()} was written by {per()}."

    @t(4)
    def _():
        return f"{title()} was published in {f.year()}."

    @t(2)
    def _():
        return f"{title()} was published by {rng.choice(ORGS[25:27])} in {f.year()}."

    @t(3)
    def _():
        p, g = f.person()
        return f"{p} wrote {title()}."

    @t(2)
    def _():
        return f"{per()} is the author of {title()}."

    @t(2)
    def _():
        return f"The genre of {title()} is {rng.choice(GENRES)}."

    @t(2)
    def _():
        return f"{title()} is a {rng.choice(GENRES)} novel."

    @t(2)
    def _():
        return f"{title()} is a novel by {per()}."

    @t(2)
    def _():
        return f"The film was directed by {per()} and released in {f.year()}."

    @t(2)
    def _():
        return f"{per()} composed the music for the film."

    @t(2)
    def _():
        return f"The album was released in {f.year()} by {rng.choice(ORGS[27:29])}."

    @t(2)
    def _():
        p, g = f.person()
        return f"{pro(g)} starred in {title()} in {f.year()}."

    # --- general sentences
    general = [
        "The city grew quickly in the nineteenth century.",
        "Many people visit the museum every year.",
        "The river flows into the sea.",
        "The book was very popular in Europe.",
        "The team won the championship in the final round.",
        "The school has many students.",
        "The university was established in the old town.",
        "She is a member of the society.",
        "He is known for his work in physics.",
        "They moved to the capital after the war.",
        "The company is one of the largest in the world.",
        "It was one of the most important events of the year.",
        "The station is on the main line.",
        "The church was rebuilt after the war.",
        "The stadium has a capacity of 50,000.",
        "The population of the region is growing.",
        "It is the largest city in the country.",
        "The film received good reviews.",
        "The game is played with two teams.",
        "He played the piano in a band.",
        "She plays tennis every week.",
        "The match lasted three hours.",
        "The two stories do not match.",
        "The colours of the curtains match.",
        "Nothing can match the speed of light.",
        "The teams compete for the cup every year.",
        "She competed in the race and won.",
        "The athletes competed in the games.",
        "He lost the game but won the match.",
    ]

    @t(10)
    def _():
        return rng.choice(general)

    weights = [w for w, _ in templates]
    total = sum(weights)
    cum = []
    acc = 0
    for w in weights:
        acc += w
        cum.append(acc / total)
    out = []
    for _ in range(n):
        r = rng.random()
        idx = next(i for i, c in enumerate(cum) if r <= c)
        out.append(templates[idx][1]())
    return out


# ---------------------------------------------------------------- embeddings

TOKEN_RE = re.compile(r"\d+(?:[.,]\d+)*%?|'s|[A-Za-z]+(?:[-'][A-Za-z]+)*|[^\sA-Za-z\d]")


def tokens(text):
    return [t.lower() for t in TOKEN_RE.findall(text)]


def content_tokens(text):
    """Case-folded tokens with mid-sentence capitalised words (proper names) masked out."""
    out = []
    for i, t in enumerate(TOKEN_RE.findall(text)):
        out.append(None if i > 0 and t[:1].isupper() else t.lower())
    return out


def build_embeddings(lines, gloss_lines, dim, min_count, window=4, seed=7):
    docs = [content_tokens(l) for l in lines] + [content_tokens(g) for g in gloss_lines] * 50
    counts = Counter(w for d in docs for w in d if w is not None)
    vocab = sorted(w for w, c in counts.items() if c >= min_count and re.match(r"[a-z]", w))
    index = {w: i for i, w in enumerate(vocab)}
    co = defaultdict(float)
    for d in docs:
        ids = [index.get(w) if w is not None else None for w in d]
        for i, a in enumerate(ids):
            if a is None:
                continue
            for j in range(max(0, i - window), min(len(ids), i + window + 1)):
                b = ids[j]
                if j == i or b is None:
                    continue
                co[(a, b)] += 1.0 / abs(i - j)
    rows, cols, vals = zip(*((a, b, v) for (a, b), v in co.items()))
    m = csr_matrix((vals, (rows, cols)), shape=(len(vocab), len(vocab)))
    total = m.sum()
    row = np.asarray(m.sum(axis=1)).ravel()
    col = np.asarray(m.sum(axis=0)).ravel() ** 0.75
    col = col / col.sum() * total
    m = m.tocoo()
    pmi = np.log(m.data * total / (row[m.row] * col[m.col]))
    keep = pmi > 0
    ppmi = csr_matrix((pmi[keep], (m.row[keep], m.col[keep])), shape=m.shape)
    k = min(dim, len(vocab) - 1)
    np.random.seed(seed)
    u, s, vt = svds(ppmi, k=k, v0=np.ones(len(vocab)) / math.sqrt(len(vocab)))
    order = np.argsort(-s)
    u, s, vt = u[:, order], s[order], vt[order]
    # fix sign ambiguity for determinism
    signs = np.sign(u[np.abs(u).argmax(axis=0), range(k)])
    u = u * signs
    vecs = u * np.sqrt(s) + (vt.T * signs) * np.sqrt(s)
    if k < dim:
        vecs = np.hstack([vecs, np.zeros((len(vocab), dim - k))])
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    norms[norms == 0] = 1
    vecs = vecs / norms
    with open(RES / "embeddings.txt", "w") as fh:
        for w, v in zip(vocab, vecs):
            fh.write(w + " " + " ".join(f"{x:.5f}" for x in v) + "\n")
    return len(vocab)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sentences", type=int, default=50000)
    ap.add_argument("--dim", type=int, default=300)
    ap.add_argument("--seed", type=int, default=20190101)
    args = ap.parse_args()

    verbs, forms, nouns, plurals, dropped = build_lexicons()
    for f, v in dropped:
        print(f"note: '{f}' is both a form of '{v}' and a lemma; no exception emitted")
    write_gazetteer()
    rng = random.Random(args.seed)
    lines = sentences(rng, args.sentences)
    CORPUS.mkdir(parents=True, exist_ok=True)
    (CORPUS / "lm_corpus.txt").write_text("".join(l + "\n" for l in lines))
    gloss_lines = [row[2] for row in read_tsv(RES / "glosses.tsv")]
    n = build_embeddings(lines, gloss_lines, args.dim, min_count=3)
    print(f"verbs={len(verbs)} sentences={len(lines)} embedding_vocab={n}")


if __name__ == "__main__":
    main()
