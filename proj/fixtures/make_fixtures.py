#!/usr/bin/env python3
"""Generates the bundled fixtures.

replay_counts/   synthetic dump, related lists and review labels whose
                snowballing run reproduces the reference strategy counts
citation/       four-question graph around discussion 26011
top_cited/      graph whose most-cited discussions have in-degrees 6,6,4,3,3

Output is deterministic; rerun after editing and commit the result.
"""

import argparse
import json
import random
from pathlib import Path
from xml.sax.saxutils import quoteattr

WORDS = (
    "schedule budget milestone stakeholder estimate risk sprint backlog velocity scope "
    "deadline resource planning agile scrum kanban review retrospective charter baseline "
    "contract vendor meeting report status dependency priority team lead manager client "
    "quality delivery release roadmap forecast burn chart effort story point epic feature "
    "requirement change control governance portfolio program sponsor approval tracking"
).split()
TAGS = ("scrum agile risk-management estimation stakeholders kanban budget "
        "scheduling team-management metrics communication").split()
TD_TYPES = ("architecture build code defect design documentation infrastructure people "
            "process requirements service test test_automation usability versioning").split()
RULES = ("R1", "R2", "R3", "R4")


class Dump:
    def __init__(self, seed):
        self.rng = random.Random(seed)
        self.next_id = 1000
        self.next_comment = 1
        self.next_link = 1
        self.posts = []
        self.comments = []
        self.links = []
        self.related = {}  # source question -> ordered targets
        self.next_user = 10

    def words(self, n):
        return " ".join(self.rng.choice(WORDS) for _ in range(n))

    def user(self):
        self.next_user += 1
        return self.next_user

    def question(self, answers=2, score=3, answer_scores=None, term=None, where="title",
                 self_answered=False, qid=None):
        """Adds a discussion; `term` is placed in the named field."""
        if qid is None:
            qid = self.next_id
            self.next_id += 1 + answers
        owner = self.user()
        title = self.words(5).capitalize()
        body = f"<p>{self.words(25)}</p>"
        tags = self.rng.sample(TAGS, 2)
        if term and where == "title":
            title = f"{title} {term}"
        elif term and where == "body":
            body = f"<p>{self.words(8)} {term} {self.words(8)}</p>"
        elif term and where == "tags":
            tags[0] = f"technical-{term}"
        self.posts.append(dict(Id=qid, PostTypeId=1, Score=score, OwnerUserId=owner, Title=title,
                               Body=body, Tags="".join(f"<{t}>" for t in tags),
                               AnswerCount=answers, CreationDate=self.date(qid)))
        answer_ids = []
        for k in range(answers):
            aid = qid + 1 + k
            answer_ids.append(aid)
            text = self.words(30)
            if term and where == "answer" and k == 0:
                text = f"{text} {term}"
            a_score = answer_scores[k] if answer_scores else 0
            self.posts.append(dict(Id=aid, PostTypeId=2, ParentId=qid, Score=a_score,
                                   OwnerUserId=owner if self_answered else self.user(),
                                   Body=f"<p>{text}</p>", CreationDate=self.date(aid)))
        if term and where == "comment":
            self.comment(qid, f"{self.words(6)} {term}")
        elif self.rng.random() < 0.3:
            self.comment(answer_ids[0] if answer_ids else qid, self.words(6))
        return qid, answer_ids

    def comment(self, post, text, score=0):
        self.comments.append(dict(Id=self.next_comment, PostId=post, Score=score, Text=text,
                                  UserId=self.user(), CreationDate=self.date(post)))
        self.next_comment += 1

    def link(self, source, target, kind=1):
        self.links.append(dict(Id=self.next_link, CreationDate=self.date(source), PostId=source,
                               RelatedPostId=target, LinkTypeId=kind))
        self.next_link += 1

    def relate(self, source, target):
        self.related.setdefault(source, []).append(target)

    @staticmethod
    def date(seed):
        return f"20{12 + seed % 9:02d}-{1 + seed % 12:02d}-{1 + seed % 28:02d}T10:{seed % 60:02d}:00.000"

    def write(self, out: Path):
        dump = out / "dump"
        dump.mkdir(parents=True, exist_ok=True)
        write_rows(dump / "Posts.xml", "posts", self.posts)
        write_rows(dump / "Comments.xml", "comments", self.comments)
        write_rows(dump / "PostLinks.xml", "postlinks", self.links)
        with open(out / "related.jsonl", "w") as f:
            for source in sorted(self.related):
                for rank, target in enumerate(self.related[source], start=1):
                    f.write(json.dumps({"source": source, "target": target, "rank": rank,
                                        "origin": "api"}) + "\n")


def write_rows(path, root, rows):
    with open(path, "w", encoding="utf-8") as f:
        f.write(f'<?xml version="1.0" encoding="utf-8"?>\n<{root}>\n')
        for row in rows:
            attrs = " ".join(f"{k}={quoteattr(str(v))}" for k, v in row.items())
            f.write(f"  <row {attrs} />\n")
        f.write(f"</{root}>\n")


class Reviews:
    """Two reviewers per discussion; every seventh one starts in conflict
    and a third reviewer settles it."""

    def __init__(self, seed):
        self.rng = random.Random(seed)
        self.rows = []
        self.clock = 0
        self.count = 0

    def stamp(self):
        self.clock += 1
        return f"2021-03-{1 + self.clock // 86400:02d}T{self.clock // 3600 % 24:02d}:" \
               f"{self.clock // 60 % 60:02d}:{self.clock % 60:02d}Z"

    def label(self, did, reviewer, valid, codes=None, rule=None):
        row = {"discussion_id": did, "reviewer": reviewer,
               "verdict": "valid" if valid else "false_positive",
               "triggered_rule": None if valid else (rule or self.rng.choice(RULES)),
               "codes": {"Q1": codes or [self.rng.choice(TD_TYPES)]} if valid else {},
               "created_at": self.stamp()}
        row["request_token"] = f"{did}-{reviewer}"
        self.rows.append(row)

    def decide(self, did, valid):
        self.count += 1
        codes = sorted(self.rng.sample(TD_TYPES, 2))
        rule = self.rng.choice(RULES)
        if self.count % 7 == 0:
            # disagreement on the verdict, resolved by majority
            self.label(did, "ana", valid, codes, rule)
            self.label(did, "ben", not valid, codes, rule)
            self.label(did, "cleo", valid, codes, rule)
        elif valid and self.count % 11 == 0:
            # same verdict, different coded answers
            self.label(did, "ana", True, codes[:1])
            self.label(did, "ben", True, codes[1:])
            self.label(did, "cleo", True, codes[:1])
        else:
            self.label(did, "ana", valid, codes, rule)
            self.label(did, "ben", valid, codes, rule)

    def write(self, path):
        with open(path, "w") as f:
            for row in self.rows:
                f.write(json.dumps(row) + "\n")


# Passing snowball candidates per provenance class, and how many are valid.
CLASSES = [
    (("LB",), 25, 13),
    (("LF",), 47, 19),
    (("RB",), 61, 29),
    (("RF",), 111, 39),
    (("RB", "RF"), 37, 28),
    (("LB", "RB", "RF"), 4, 2),
    (("LB", "RF"), 2, 0),
    (("LB", "LF", "RB", "RF"), 1, 0),
    (("LB", "RB"), 1, 0),
    (("LB", "LF"), 1, 0),
    (("LF", "RF"), 1, 0),
]


def replay_counts(out: Path):
    d = Dump(seed=2021)
    search_reviews = Reviews(seed=1)
    snow_reviews = Reviews(seed=2)
    placements = ["title", "body", "tags", "answer", "comment"]

    # Start-set search: 240 matches, 226 pass the filters, 108 valid.
    valid_start, false_pos = [], []
    for i in range(108):
        term = "debt" if i % 3 else "shortcut"
        qid, _ = d.question(answers=4, score=8, term=term, where=placements[i % 5])
        valid_start.append(qid)
    for i in range(118):
        qid, _ = d.question(answers=1 + i % 3, score=i % 6, answer_scores=[1, 0, 2][: 1 + i % 3],
                            term="debt", where=placements[i % 5])
        false_pos.append(qid)
    for i in range(6):
        d.question(answers=0, score=2, term="debt", where=placements[i % 5])
    for i in range(4):
        d.question(answers=2, score=1, term="debt", where="title", self_answered=True)
    for i in range(4):
        d.question(answers=3, score=-1 - i, term="shortcut", where="body")
    valid_ids = set(valid_start)
    for qid in sorted(valid_start + false_pos):
        search_reviews.decide(qid, qid in valid_ids)

    # Unrelated discussions nobody reaches.
    for _ in range(30):
        d.question(answers=d.rng.randint(0, 4), score=d.rng.randint(-2, 12))
    d.posts.append(dict(Id=d.next_id, PostTypeId=5, Body="tag wiki", CreationDate=d.date(1)))
    d.next_id += 1

    # Snowball candidates.
    start = sorted(valid_start)
    k = 0

    def anchor():
        nonlocal k
        k += 1
        return start[(k * 37) % len(start)]

    start_answers = {}
    for p in d.posts:
        if p.get("PostTypeId") == 2:
            start_answers.setdefault(p["ParentId"], []).append(p["Id"])

    for strategies, count, n_valid in CLASSES:
        related = any(s.startswith("R") for s in strategies)
        for i in range(count):
            answers = d.rng.randint(4, 7) if related else d.rng.randint(1, 5)
            score = d.rng.randint(8, 20) if related else d.rng.randint(0, 15)
            # The last LB-only candidate is also a related target below the
            # thresholds: only its linked provenance survives.
            stripped = strategies == ("LB",) and i == count - 1
            if stripped:
                answers, score = 2, 3
            qid, answer_ids = d.question(answers=answers, score=score)
            if stripped:
                d.relate(anchor(), qid)
            for s in strategies:
                a = anchor()
                if s == "LB":
                    # some backward links are placed on an answer of the start discussion
                    d.link(start_answers[a][0] if i % 4 == 1 else a, qid)
                elif s == "LF":
                    d.link(answer_ids[0] if i % 5 == 2 else qid, a)
                elif s == "RB":
                    d.relate(a, qid)
                else:
                    d.relate(qid, a)
            snow_reviews.decide(qid, i < n_valid)

    # Reached but rejected: each of these must stay out of the counts above.
    for answers, score in ((2, 10), (5, 3), (3, 30)):
        below, _ = d.question(answers=answers, score=score)
        d.relate(anchor(), below)
    below_rf, _ = d.question(answers=1, score=9)
    d.relate(below_rf, anchor())
    incomplete, _ = d.question(answers=0, score=5)
    d.link(anchor(), incomplete)
    self_only, _ = d.question(answers=2, score=5, self_answered=True)
    d.link(anchor(), self_only)
    for s in (-1, -4):
        negative, _ = d.question(answers=3, score=s)
        d.link(negative, anchor())
    d.relate(anchor(), false_pos[0])
    d.link(anchor(), false_pos[1])
    d.link(false_pos[2], anchor())
    d.link(anchor(), 999999)
    d.relate(anchor(), 999998)
    dup_target, _ = d.question(answers=4, score=12)
    d.link(anchor(), dup_target, kind=3)
    a = anchor()
    d.link(start_answers[a][1], a)  # lifts to a self link
    d.link(anchor(), anchor(), kind=7)
    d.link(start[0], start[1])  # links inside the start set reach nothing new

    d.write(out)
    search_reviews.write(out / "labels_search.jsonl")
    snow_reviews.write(out / "labels_snowball.jsonl")


def small_graph(out: Path, questions, linked, related):
    d = Dump(seed=7)
    for qid in questions:
        d.question(answers=2, score=4, qid=qid)
    for s, t in linked:
        d.link(s, t)
    for s, t in related:
        d.relate(s, t)
    d.write(out)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent)
    args = parser.parse_args()

    replay_counts(args.out / "replay_counts")
    small_graph(args.out / "citation", [26011, 26070, 28023, 29724],
                linked=[(26070, 26011), (28023, 26011)], related=[(29724, 26011)])
    top = [8286, 11144, 718, 15505, 16372]
    sources = list(range(40000, 40600, 100))
    related = [(s, 8286) for s in sources] + [(s, 11144) for s in sources]
    related += [(s, 718) for s in sources[:4]] + [(s, 15505) for s in sources[:3]]
    related += [(sources[5], 16372)]
    linked = [(sources[0], 16372), (sources[1], 16372)]
    small_graph(args.out / "top_cited", top + sources, linked=linked, related=related)


if __name__ == "__main__":
    main()
