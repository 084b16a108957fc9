"""Python access to the snowballing toolkit core."""

import json

from ._glsb import GlsbError, precision
from . import _glsb

__all__ = ["GlsbError", "Project", "ingest_dump", "import_related", "search", "more_like_this", "precision"]


def ingest_dump(dump_dir, store_dir):
    return json.loads(_glsb.ingest_dump(str(dump_dir), str(store_dir)))


def import_related(store_dir, edge_file):
    return _glsb.import_related(str(store_dir), str(edge_file))


def search(store_dir, terms, fields="all", mode="substring"):
    return json.loads(_glsb.search(str(store_dir), list(terms), fields, mode))


def more_like_this(store_dir, source, config=None):
    return _glsb.more_like_this(str(store_dir), source, json.dumps(config) if config else "")


class Project:
    def __init__(self, handle):
        self._p = handle

    @classmethod
    def create(cls, directory, config, token=""):
        return cls(_glsb.Project.create(str(directory), json.dumps(config), token))

    @classmethod
    def open(cls, directory):
        return cls(_glsb.Project.open(str(directory)))

    @property
    def id(self):
        return self._p.id

    def run_start_set(self, token=""):
        return self._p.run_start_set(token)

    def run_snowball(self, filter=None, token=""):
        return self._p.run_snowball(json.dumps(filter) if filter else "", token)

    def submit_label(self, label, token=""):
        return json.loads(self._p.submit_label(json.dumps(label), token))

    def screening_queue(self, reviewer):
        return self._p.screening_queue(reviewer)

    def candidate_ids(self, iteration):
        return sorted(self._p.candidate_ids(iteration))

    def discussion(self, discussion_id):
        return json.loads(self._p.discussion(discussion_id))

    def report(self, format="structured"):
        return self._p.report(format)
