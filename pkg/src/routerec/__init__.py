"""Sentiment-aware place recommendation with code-table review
classification, boosted TF-IDF ranking, and shortest-path routing."""

__version__ = "0.1.0"
