"""Evidence acquisition from the four heterogeneous sources: web search,
knowledge base, knowledge graph, and user-uploaded files."""

from .kb import KbIndex, build_kb_index, load_kb_corpus, retrieve_kb
from .kg import KgIndex, build_kg_index, linearize_triple, load_kg_corpus, retrieve_kg
from .uf import UploadedFile, retrieve_uf
from .web import FixtureWebBackend, HttpWebBackend, WebBackend, search_web

__all__ = [
    "KbIndex",
    "KgIndex",
    "UploadedFile",
    "FixtureWebBackend",
    "HttpWebBackend",
    "WebBackend",
    "build_kb_index",
    "build_kg_index",
    "linearize_triple",
    "load_kb_corpus",
    "load_kg_corpus",
    "retrieve_kb",
    "retrieve_kg",
    "retrieve_uf",
    "search_web",
]
