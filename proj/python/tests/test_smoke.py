import json
import os
from pathlib import Path

import pytest

import glsb

FIXTURES = Path(os.environ.get("GLSB_FIXTURES", Path(__file__).resolve().parents[2] / "fixtures"))


@pytest.fixture()
def store(tmp_path):
    fixture = FIXTURES / "replay_counts"
    counts = glsb.ingest_dump(fixture / "dump", tmp_path / "store")
    assert counts["posts"] > 0
    assert glsb.import_related(tmp_path / "store", fixture / "related.jsonl") > 0
    return tmp_path / "store"


def replay(project, name):
    with open(FIXTURES / "replay_counts" / name) as f:
        for line in f:
            label = json.loads(line)
            token = label.pop("request_token", "")
            project.submit_label(label, token)


def test_precision():
    assert glsb.precision(226, 108) == (54, 113)
    assert glsb.precision(0, 0) is None
    with pytest.raises(glsb.GlsbError):
        glsb.precision(1, 2)


def test_search_and_similarity(store):
    matches = glsb.search(store, ["debt", "shortcut"])
    assert len(matches) >= 226
    assert all(m["hits"] for m in matches)
    first = matches[0]["discussion_id"]
    similar = glsb.more_like_this(store, first, {"top_k": 3})
    assert len(similar) <= 3
    assert all(score >= 0 for _, score in similar)


def test_project_pipeline(store, tmp_path):
    project = glsb.Project.create(tmp_path / "proj", {"id": "smoke", "corpus_dir": str(store)}, "t-1")
    assert project.id == "smoke"
    assert project.run_start_set() == 226
    replay(project, "labels_search.jsonl")
    assert project.screening_queue("ana") == []
    assert project.run_snowball() == 291
    replay(project, "labels_snowball.jsonl")

    records = [json.loads(line) for line in project.report("structured").splitlines()]
    sources = {r["source"]: r for r in records if r["record"] == "source"}
    assert sources["AllSB"]["valid"] == 130
    assert sources["search"]["precision"]["percent"] == 48
    gain = next(r for r in records if r["record"] == "relative_recall_gain")
    assert gain["value"]["percent"] == 120

    reopened = glsb.Project.open(tmp_path / "proj")
    assert reopened.report("table") == project.report("table")
    view = reopened.discussion(reopened.candidate_ids(1)[0])
    assert view["complete"] is True


def test_errors_surface_as_glsb_error(store, tmp_path):
    with pytest.raises(glsb.GlsbError, match="not_found"):
        glsb.Project.create(tmp_path / "p", {"id": "x", "corpus_dir": str(tmp_path / "none")})
    project = glsb.Project.create(tmp_path / "p", {"id": "x", "corpus_dir": str(store)})
    project.run_start_set()
    with pytest.raises(glsb.GlsbError, match="schema_violation"):
        project.submit_label({"discussion_id": 1000, "reviewer": "", "verdict": "valid"})
