#!/usr/bin/env python3
"""Expands the hand-annotated mini corpus into the fixture files.

Every sentence is written once, as a bracketed dependency parse:

  ( ... )        a phrase; the element prefixed with * is its head and every
                 other element attaches to it. The outermost phrase's head is
                 the root.
  [w1 w2]/LAB    a multi-token named entity; its head is the *-marked word,
                 else the last word.
  word/LAB       a single-token entity (DATE, GPE, ORG, PERSON, LOC, FAC, ...)
  word/V         a verb (part-of-speech VERB)

Next to each sentence the annotator lists the trajectories it states
("person|time|location", surface forms) and, for training data, triplets
that the sentence mentions without placing the person there ("neg").

Outputs (next to this script):
  corpus.jsonl               pages {page_id, title, paragraphs}
  annotations.jsonl          per-sentence tokens/pos/entities/heads
  manual_trajectories.jsonl  the manual trajectory list
  labeled.jsonl              manual labels for the first three pages
  regular.jsonl              manual labels for the remaining pages
"""

import json
import os
import re

PAGES = [
    ("Margaret_Ellen_Hale", "Margaret Ellen Hale", [
        [
            ("( [Margaret Ellen Hale]/PERSON was *born/V ( *in Leeds/GPE ) ( *on [2 March 1921]/DATE ) . )",
             ["Margaret Ellen Hale|2 March 1921|Leeds"], []),
            ("( ( Her *father ) *taught/V Latin ( *at [Leeds Grammar School]/ORG ) . )", [], []),
            ("( ( *In 1939/DATE ) she *entered/V ( *[Somerville College]/ORG , Oxford/GPE , "
             "( where she *studied/V history ) ) . )",
             ["she|1939|Somerville College"], []),
            ("( She *graduated/V ( *with ( first-class *honours ) ) ( *in 1942/DATE ) . )", [], []),
        ],
        [
            ("( ( *During ( the *war ) ) she *worked/V ( *at [Bletchley Park]/FAC ) "
             "( *from [1942 to 1945]/DATE ) . )",
             ["she|1942 to 1945|Bletchley Park"], []),
            ("( She *returned/V ( *to Leeds/GPE ) ( *in 1945/DATE ) ( to *care/V ( *for ( her *mother ) ) ) . )",
             ["She|1945|Leeds"], []),
            ("( ( *In 1946/DATE ) she *returned/V ( *to Oxford/GPE ) ( *as ( a junior research *fellow ) ) . )",
             ["she|1946|Oxford"], []),
            ("( ( *In 1949/DATE ) she *travelled/V ( *to ( *Bruges/GPE and Ghent/GPE ) ) "
             "( to *consult/V ( the city *archives ) ) . )",
             ["she|1949|Bruges", "she|1949|Ghent"], []),
            ("( ( Her first *book , ( a *study ( *of ( the wool *trade ( *in Flanders/GPE ) ) ) ) , ) "
             "*appeared/V ( *in 1951/DATE ) . )", [], []),
            ("( ( *In 1952/DATE ) she *translated/V ( a *chronicle ( *of Bruges/GPE ) ) . )",
             [], ["she|1952|Bruges"]),
            ("( She *spent/V [the academic year 1953]/DATE ( *at ( *[Harvard University]/ORG , "
             "( where she *met/V [Arthur Kingsley]/PERSON ) ) ) . )",
             ["She|the academic year 1953|Harvard University",
              "Arthur Kingsley|the academic year 1953|Harvard University"], []),
        ],
        [
            ("( ( *In 1958/DATE ) Hale/PERSON was *appointed/V ( *professor ( *of ( medieval *history ) ) ) "
             "( *at the [*University of Edinburgh]/ORG ) . )",
             ["Hale|1958|University of Edinburgh"], []),
            ("( ( *From [1962 to 1963]/DATE ) she *was ( a visiting *fellow ( *at ( the "
             "*[*Institute for Advanced Study]/ORG ( *in Princeton/GPE ) ) ) ) . )",
             ["she|1962 to 1963|Institute for Advanced Study"], []),
            ("( ( *In 1963/DATE ) she *published/V ( a *history ( *of Venice/GPE ) ) . )",
             [], ["she|1963|Venice"]),
            ("( ( *In 1956/DATE ) she *reviewed/V ( a *book ( *on ( medieval *Genoa/GPE ) ) ) . )",
             [], ["she|1956|Genoa"]),
            ("( She *spent/V 1965/DATE ( *in Florence/GPE ) . )", ["She|1965|Florence"], []),
            ("( She *visited/V Venice/GPE ( *in 1967/DATE ) ( to *study/V ( Venetian trade *records ) ) . )",
             ["She|1967|Venice"], []),
            ("( She *praised/V ( the *archives ( *of Venice/GPE ) ) ( *in 1968/DATE ) . )",
             [], ["She|1968|Venice"]),
            ("( ( *In 1970/DATE ) she *delivered/V ( the Ford *Lectures ) ( *at Oxford/GPE ) . )",
             ["she|1970|Oxford"], []),
            ("( ( *In 1975/DATE ) she *lectured/V ( *at the [*University of Toronto]/ORG ) . )",
             ["she|1975|University of Toronto"], []),
            ("( ( *In 1978/DATE ) she *wrote/V ( an *essay ( *on ( the *sack ( *of Constantinople/GPE ) ) ) ) . )",
             [], ["she|1978|Constantinople"]),
            ("( She *held/V ( the *chair ) ( *until ( her *retirement ( *in 1986/DATE ) ) ) . )", [], []),
            ("( She *moved/V ( *to ( a *cottage ( *near Peebles/GPE ) ) ) ( *in 1987/DATE ) . )",
             ["She|1987|Peebles"], []),
            ("( She *died/V ( *in Edinburgh/GPE ) ( *on [17 November 1994]/DATE ) . )",
             ["She|17 November 1994|Edinburgh"], []),
        ],
    ]),
    ("Tomas_Veldhuis", "Tomas Veldhuis", [
        [
            ("( [Tomas Veldhuis]/PERSON was *born/V ( *in Utrecht/GPE ) ( *in 1898/DATE ) . )",
             ["Tomas Veldhuis|1898|Utrecht"], []),
            ("( He *grew/V up ( *in ( *Rotterdam/GPE , ( where ( his *father ) *ran/V ( a shipping *office ) ) ) ) . )",
             [], []),
            ("( ( *In 1916/DATE ) he *enrolled/V ( *at [Leiden University]/ORG ) . )",
             ["he|1916|Leiden University"], []),
            ("( ( *After ( *graduating/V ( *in 1921/DATE ) ) ) , he *moved/V ( *to Amsterdam/GPE ) . )",
             ["he|1921|Amsterdam"], []),
            ("( ( *In 1923/DATE ) he *travelled/V ( *to Berlin/GPE ) . )", ["he|1923|Berlin"], []),
        ],
        [
            ("( ( *Between [1925 and 1929]/DATE ) he *worked/V ( *for ( the *[Nederlandsche *Bank]/ORG "
             "( *in Amsterdam/GPE ) ) ) . )",
             ["he|1925 and 1929|Nederlandsche Bank"], []),
            ("( He *married/V [Anna de Wit]/PERSON ( *in Delft/GPE ) ( *in 1926/DATE ) . )",
             ["He|1926|Delft", "Anna de Wit|1926|Delft"], []),
            ("( ( *In 1930/DATE ) he *received/V ( a *doctorate ) ( *from the [*University of Amsterdam]/ORG ) . )",
             ["he|1930|University of Amsterdam"], []),
            ("( ( *In 1928/DATE ) he *compared/V ( the *ports ( *of ( *Hamburg/GPE and Antwerp/GPE ) ) ) . )",
             [], ["he|1928|Hamburg"]),
            ("( He *spent/V 1931/DATE ( *in London/GPE ) , ( *studying/V ( *at the "
             "[London *School of Economics]/ORG ) ) . )",
             ["He|1931|London", "He|1931|London School of Economics"], []),
            ("( ( *In 1932/DATE ) he *wrote/V ( a *survey ( *of ( the Baltic/LOC grain *trade ) ) ) . )",
             [], ["he|1932|Baltic"]),
        ],
        [
            ("( ( *In 1935/DATE ) Veldhuis/PERSON *became/V ( *professor ( *of ( economic *history ) ) ) "
             "( *at [Leiden University]/ORG ) . )",
             ["Veldhuis|1935|Leiden University"], []),
            ("( ( *During ( the German *occupation ) ) he was *held/V ( *in ( the *[Buchenwald *camp]/FAC ) ) "
             "( *from [1940 to 1942]/DATE ) . )",
             ["he|1940 to 1942|Buchenwald camp"], []),
            ("( ( *After ( the *war ) ) he *returned/V ( *to ( *Leiden/GPE , ( where he *taught/V "
             "( *until 1968/DATE ) ) ) ) . )",
             ["he|1968|Leiden"], []),
            ("( ( *In 1947/DATE ) he *lectured/V ( *at ( *[Columbia University]/ORG ( *in [New York]/GPE ) ) ) . )",
             ["he|1947|Columbia University"], []),
            ("( ( *In 1952/DATE ) he *edited/V ( a *volume ( *on ( the *history ( *of Antwerp/GPE ) ) ) ) . )",
             [], ["he|1952|Antwerp"]),
            ("( ( *In 1960/DATE ) he *reviewed/V ( a *history ( *of Batavia/GPE ) ) . )",
             [], ["he|1960|Batavia"]),
            ("( He *spent/V 1956/DATE ( *in Stockholm/GPE ) ( *as ( a visiting *professor ) ) . )",
             ["He|1956|Stockholm"], []),
            ("( ( *In 1969/DATE ) he *settled/V ( *in Wassenaar/GPE ) . )", ["he|1969|Wassenaar"], []),
            ("( He *described/V ( the *famine ( *in Bengal/GPE ) ) ( *in 1962/DATE ) . )",
             [], ["He|1962|Bengal"]),
            ("( He *died/V ( *at [The Hague]/GPE ) ( *on [3 June 1975]/DATE ) . )",
             ["He|3 June 1975|The Hague"], []),
            ("( ( His collected *essays ) were *published/V ( *in Amsterdam/GPE ) ( *in 1980/DATE ) . )", [], []),
        ],
    ]),
    ("Arthur_Penrose_Kingsley", "Arthur Penrose Kingsley", [
        [
            ("( [Arthur Penrose Kingsley]/PERSON was *born/V ( *on [11 July 1915]/DATE ) "
             "( *in ( *Springfield/GPE , Illinois/GPE ) ) . )",
             ["Arthur Penrose Kingsley|11 July 1915|Springfield"], []),
            ("( He *attended/V ( public *schools ( *in Chicago/GPE ) ) ( *before ( *entering/V "
             "[Harvard College]/ORG ( *in 1933/DATE ) ) ) . )",
             ["He|1933|Harvard College"], ["He|1933|Chicago"]),
            ("( ( *In 1938/DATE ) he *travelled/V ( *to Paris/GPE ) . )", ["he|1938|Paris"], []),
            ("( He *received/V ( his *doctorate ) ( *from [Harvard University]/ORG ) ( *in 1941/DATE ) . )",
             ["He|1941|Harvard University"], []),
        ],
        [
            ("( ( *In 1942/DATE ) he *joined/V ( the *[United States *Navy]/ORG ) and ( *served/V "
             "( *in ( the *Pacific/LOC ) ) ( *until 1945/DATE ) ) . )",
             ["he|1942|United States Navy", "he|1945|Pacific"], []),
            ("( ( *After ( the *war ) ) Kingsley/PERSON *taught/V ( *at the [*University of Chicago]/ORG ) "
             "( *from [1946 to 1952]/DATE ) . )",
             ["Kingsley|1946 to 1952|University of Chicago"], []),
            ("( ( *In 1950/DATE ) he *conducted/V research ( *in London/GPE ) . )", ["he|1950|London"], []),
            ("( He *returned/V ( *to [Harvard University]/ORG ) ( *in 1953/DATE ) ( *as ( an associate *professor ) ) . )",
             ["He|1953|Harvard University"], []),
            ("( He *lived/V ( *in ( *Cambridge/GPE , Massachusetts/GPE , ) ) ( *from [1953 to 1980]/DATE ) . )",
             ["He|1953 to 1980|Cambridge"], []),
            ("( ( *In 1957/DATE ) he *published/V ( a *history ( *of ( the Spanish *conquest ( *of Peru/GPE ) ) ) ) . )",
             [], ["he|1957|Peru"]),
            ("( ( *In 1948/DATE ) he *reviewed/V ( a *study ( *of ( colonial *Virginia/GPE ) ) ) . )",
             [], ["he|1948|Virginia"]),
        ],
        [
            ("( ( *In 1961/DATE ) he *spent/V [six months]/DATE ( *in [Mexico City]/GPE ) "
             "( *researching/V ( colonial *archives ) ) . )",
             ["he|1961|Mexico City"], []),
            ("( He *met/V [Rafael Ortega Salcedo]/PERSON ( *at the [National *University of Mexico]/ORG ) "
             "( *in 1961/DATE ) . )",
             ["He|1961|National University of Mexico",
              "Rafael Ortega Salcedo|1961|National University of Mexico"], []),
            ("( He *spent/V [the spring of 1965]/DATE ( *at ( the *[Huntington *Library]/ORG ( *in California/GPE ) ) ) . )",
             ["He|the spring of 1965|Huntington Library"], []),
            ("( ( *In 1972/DATE ) he *wrote/V ( a celebrated *essay ( *on Boston/GPE ) ) . )",
             [], ["he|1972|Boston"]),
            ("( ( *In 1968/DATE ) he *criticised/V ( the *war ( *in Vietnam/GPE ) ) . )",
             [], ["he|1968|Vietnam"]),
            ("( ( *In 1975/DATE ) he *taught/V ( *at [Stanford University]/ORG ) ( *as ( a visiting *professor ) ) . )",
             ["he|1975|Stanford University"], []),
            ("( Kingsley/PERSON *retired/V ( *from [Harvard University]/ORG ) ( *in 1980/DATE ) and "
             "( *moved/V ( *to [Santa Fe]/GPE ) ) . )",
             ["Kingsley|1980|Harvard University", "Kingsley|1980|Santa Fe"], []),
            ("( He *died/V ( *in [Santa Fe]/GPE ) ( *on [2 February 1999]/DATE ) . )",
             ["He|2 February 1999|Santa Fe"], []),
        ],
    ]),
    ("Ilse_Marguerite_Brandt", "Ilse Marguerite Brandt", [
        [
            ("( [Ilse Marguerite Brandt]/PERSON was *born/V ( *in Vienna/GPE ) ( *on [9 September 1908]/DATE ) . )",
             ["Ilse Marguerite Brandt|9 September 1908|Vienna"], []),
            ("( She *studied/V ( *history and philology ) ( *at the [*University of Vienna]/ORG ) "
             "( *from [1926 to 1931]/DATE ) . )",
             ["She|1926 to 1931|University of Vienna"], []),
            ("( ( *In 1932/DATE ) she *moved/V ( *to Berlin/GPE ) ( to *work/V ( *at ( the "
             "*[Prussian State *Library]/ORG ) ) ) . )",
             ["she|1932|Berlin", "she|1932|Prussian State Library"], []),
            ("( ( *In 1934/DATE ) she *worked/V ( *in Paris/GPE ) . )", ["she|1934|Paris"], []),
        ],
        [
            ("( She *left/V Germany/GPE ( *in 1936/DATE ) and ( *emigrated/V ( *to ( the *[United *States]/GPE ) ) ) . )",
             ["She|1936|Germany", "She|1936|United States"], []),
            ("( ( *From 1937/DATE ) she *taught/V ( *at ( *[Vassar College]/ORG ( *in Poughkeepsie/GPE ) ) ) . )",
             ["she|1937|Vassar College"], []),
            ("( She *settled/V ( *in Poughkeepsie/GPE ) ( *in 1937/DATE ) . )", ["She|1937|Poughkeepsie"], []),
            ("( She *became/V ( an American *citizen ) ( *in 1943/DATE ) . )", [], []),
            ("( ( *In 1949/DATE ) she *became/V ( a *fellow ( *of [Radcliffe College]/ORG ) ) . )",
             ["she|1949|Radcliffe College"], []),
            ("( ( *In [the academic year 1953]/DATE ) Brandt/PERSON *lectured/V ( *at [Harvard University]/ORG ) . )",
             ["Brandt|the academic year 1953|Harvard University"], []),
        ],
        [
            ("( ( *After ( the *war ) ) she *revisited/V Vienna/GPE ( *in 1955/DATE ) . )", ["she|1955|Vienna"], []),
            ("( She *spent/V [the *summer of 1958]/DATE ( *in Rome/GPE ) , ( *working/V ( *in ( the "
             "*[Vatican *Library]/ORG ) ) ) . )",
             ["She|the summer of 1958|Rome", "She|the summer of 1958|Vatican Library"], []),
            ("( ( *In 1962/DATE ) she *lectured/V ( *in Munich/GPE ) . )", ["she|1962|Munich"], []),
            ("( ( *In 1964/DATE ) she *published/V ( a *study ( *of ( Habsburg *Vienna/GPE ) ) ) . )",
             [], ["she|1964|Vienna"]),
            ("( She *retired/V ( *from [Vassar College]/ORG ) ( *in 1974/DATE ) . )", ["She|1974|Vassar College"], []),
            ("( ( *In 1975/DATE ) she *wrote/V ( a *memoir ( *about ( *Vienna/GPE ( *in 1918/DATE ) ) ) ) . )",
             [], ["she|1975|Vienna"]),
            ("( Brandt/PERSON *died/V ( *in ( *Poughkeepsie/GPE , [New York]/GPE , ) ) ( *on [30 April 1990]/DATE ) . )",
             ["Brandt|30 April 1990|Poughkeepsie"], []),
        ],
    ]),
    ("Rafael_Ortega_Salcedo", "Rafael Ortega Salcedo", [
        [
            ("( [Rafael Ortega Salcedo]/PERSON was *born/V ( *in Seville/GPE ) ( *in 1920/DATE ) . )",
             ["Rafael Ortega Salcedo|1920|Seville"], []),
            ("( ( His *family ) *fled/V ( *to Mexico/GPE ) ( *in 1939/DATE ) ( *after ( the "
             "*[Spanish Civil *War]/EVENT ) ) . )", [], []),
            ("( He *studied/V ( *at the [National *University of Mexico]/ORG ) and ( *graduated/V ( *in 1944/DATE ) ) . )",
             ["He|1944|National University of Mexico"], []),
        ],
        [
            ("( ( *In 1947/DATE ) Ortega/PERSON *went/V ( *to ( *Paris/GPE , ( where he *attended/V ( the *seminars "
             "( *of [Fernand Braudel]/PERSON ) ) ( *at ( the *Sorbonne/ORG ) ) ) ) ) . )",
             ["Ortega|1947|Paris", "he|1947|Sorbonne"], []),
            ("( He *returned/V ( *to [Mexico City]/GPE ) ( *in 1950/DATE ) and ( *joined/V "
             "[El *Colegio de Mexico]/ORG ) . )",
             ["He|1950|Mexico City", "He|1950|El Colegio de Mexico"], []),
            ("( ( *In 1955/DATE ) he *worked/V ( *in ( the *archives ( *of Salamanca/GPE ) ) ) . )",
             ["he|1955|Salamanca"], []),
            ("( ( *In 1958/DATE ) he *published/V ( a *history ( *of ( *Seville/GPE ( *under ( the *Habsburgs ) ) ) ) ) . )",
             [], ["he|1958|Seville"]),
        ],
        [
            ("( ( *In 1961/DATE ) he *taught/V ( *at ( the *[National *University of Mexico]/ORG , ( where he *met/V "
             "[Arthur Kingsley]/PERSON ) ) ) . )",
             ["he|1961|National University of Mexico", "Arthur Kingsley|1961|National University of Mexico"], []),
            ("( ( *In 1963/DATE ) he *travelled/V ( *to Lima/GPE ) . )", ["he|1963|Lima"], []),
            ("( ( *From [1965 to 1970]/DATE ) he *directed/V excavations ( *near Oaxaca/GPE ) . )",
             ["he|1965 to 1970|Oaxaca"], []),
            ("( ( *In 1968/DATE ) he *wrote/V ( *about ( the *conquest ( *of Tenochtitlan/GPE ) ) ) . )",
             [], ["he|1968|Tenochtitlan"]),
            ("( He was *elected/V ( *to ( the *[Mexican *Academy of History]/ORG ) ) ( *in 1972/DATE ) . )",
             ["He|1972|Mexican Academy of History"], []),
            ("( He *lectured/V ( *at ( the *[*University of Texas]/ORG ( *in Austin/GPE ) ) ) ( *in 1976/DATE ) . )",
             ["He|1976|University of Texas"], []),
            ("( He *lived/V ( *in Coyoacan/GPE ) ( *from 1981/DATE ( *until ( his *death ) ) ) . )",
             ["He|1981|Coyoacan"], []),
            ("( Ortega/PERSON *died/V ( *in [Mexico City]/GPE ) ( *on [14 January 2001]/DATE ) . )",
             ["Ortega|14 January 2001|Mexico City"], []),
        ],
    ]),
]

LABELED_PAGES = 3  # the first pages feed labeled.jsonl, the rest regular.jsonl

TOKEN_RE = re.compile(r"\*?\(|\)|\*?\[|\]/[A-Z]+|[^\s()\[\]]+")


class Parser:
    def __init__(self, dsl):
        self.items = TOKEN_RE.findall(dsl)
        self.pos = 0
        self.tokens, self.tags, self.heads, self.entities = [], [], [], []

    def peek(self):
        return self.items[self.pos]

    def take(self):
        self.pos += 1
        return self.items[self.pos - 1]

    def word(self, raw):
        text, _, tag = raw.partition("/")
        self.tokens.append(text)
        self.tags.append("VERB" if tag == "V" else "_")
        self.heads.append(None)
        index = len(self.tokens) - 1
        if tag and tag != "V":
            self.entities.append({"label": tag, "start": index, "end": index + 1})
        return index

    def entity(self):
        start = len(self.tokens)
        head = None
        while not self.peek().startswith("]/"):
            raw = self.take()
            starred = raw.startswith("*")
            index = self.word(raw.lstrip("*"))
            if starred:
                head = index
        label = self.take()[2:]
        end = len(self.tokens)
        head = end - 1 if head is None else head
        for i in range(start, end):
            if i != head:
                self.heads[i] = head
        self.entities.append({"label": label, "start": start, "end": end})
        return head

    def element(self):
        raw = self.take()
        starred = raw.startswith("*")
        body = raw[1:] if starred else raw
        if body == "(":
            return starred, self.group()
        if body == "[":
            return starred, self.entity()
        return starred, self.word(body)

    def group(self):
        members = []
        while self.peek() != ")":
            members.append(self.element())
        self.take()
        heads = [m for starred, m in members if starred]
        if len(members) == 1:
            heads = [members[0][1]]
        if len(heads) != 1:
            raise ValueError("phrase needs exactly one head: " + " ".join(self.tokens))
        for _, m in members:
            if m != heads[0]:
                self.heads[m] = heads[0]
        return heads[0]

    def parse(self):
        if self.take() != "(":
            raise ValueError("sentence must be a phrase")
        root = self.group()
        if self.pos != len(self.items):
            raise ValueError("trailing input")
        self.heads[root] = -1
        if any(h is None for h in self.heads):
            raise ValueError("unattached token")
        return self


def detokenize(tokens):
    text = ""
    for t in tokens:
        text += t if (t in {",", "."} or not text) else " " + t
    return text


def split_gold(entry):
    person, time, location = entry.split("|")
    return {"person": person, "time": time, "location": location}


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    corpus, annotations, manual, labeled, regular = [], [], [], [], []
    for page_number, (page_id, title, paragraphs) in enumerate(PAGES):
        texts = []
        for p, sentences in enumerate(paragraphs):
            sentence_texts = []
            for s, (dsl, positives, negatives) in enumerate(sentences):
                parsed = Parser(dsl).parse()
                sentence_texts.append(detokenize(parsed.tokens))
                annotations.append({"page_id": page_id, "paragraph_index": p, "sentence_index": s,
                                    "tokens": parsed.tokens, "pos": parsed.tags,
                                    "entities": parsed.entities, "heads": parsed.heads})
                for label, entries in ((1, positives), (0, negatives)):
                    for entry in entries:
                        gold = split_gold(entry)
                        for key in ("person", "time", "location"):
                            if gold[key] not in sentence_texts[-1]:
                                raise ValueError(f"{gold[key]!r} not in {sentence_texts[-1]!r}")
                        ref = {"page_id": page_id, "paragraph_index": p, "sentence_index": s}
                        if label == 1:
                            manual.append({**ref, **gold})
                        target = labeled if page_number < LABELED_PAGES else regular
                        target.append({**ref, **gold, "label": label, "source": "manual", "title": title,
                                       "paragraph": None})
            texts.append(" ".join(sentence_texts))
        corpus.append({"page_id": page_id, "title": title, "paragraphs": texts})
        for record in labeled + regular:
            if record["page_id"] == page_id and record["paragraph"] is None:
                record["paragraph"] = texts[record["paragraph_index"]]

    def dump(name, records):
        with open(os.path.join(here, name), "w", encoding="utf-8") as f:
            for r in records:
                f.write(json.dumps(r, ensure_ascii=False) + "\n")

    dump("corpus.jsonl", corpus)
    dump("annotations.jsonl", annotations)
    dump("manual_trajectories.jsonl", manual)
    dump("labeled.jsonl", labeled)
    dump("regular.jsonl", regular)
    print(f"{len(corpus)} pages, {len(annotations)} sentences, {len(manual)} manual trajectories, "
          f"{len(labeled)} labeled, {len(regular)} regular")


if __name__ == "__main__":
    main()
