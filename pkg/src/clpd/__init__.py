"""Offline cross-lingual plagiarism detection with simulated multilingual word embeddings."""

__version__ = "0.1.0"
