"""Methods for saving and loading visibility certificates."""

import abc
import json
import logging
import sqlite3
from pathlib import Path

from circular_visibility.channel import Channel
from circular_visibility.engine import VisibilityCertificate
from circular_visibility.structs import Point
from circular_visibility.utils import query_key


class CertificateNotFound(Exception):
    """Raised during cache lookup if a certificate is not found."""


class CertificateCache(abc.ABC):
    """Base class for certificate caches."""

    @abc.abstractmethod
    def try_load_certificate(
        self, ch: Channel, p: Point, d_tol: float
    ) -> VisibilityCertificate:
        """Load a certificate or raise CertificateNotFound."""

    @abc.abstractmethod
    def save(
        self, ch: Channel, p: Point, d_tol: float, cert: VisibilityCertificate
    ) -> None:
        """Save the certificate for the query."""


class FileCertificateCache(CertificateCache):
    """A cache that saves and loads from individual files."""

    def __init__(self, cache_dir: Path) -> None:
        self._cache_dir = cache_dir
        self._cache_dir.mkdir(parents=True, exist_ok=True)

    def _get_cache_file(self, ch: Channel, p: Point, d_tol: float) -> Path:
        return self._cache_dir / f"{query_key(ch, p, d_tol)}.json"

    def try_load_certificate(
        self, ch: Channel, p: Point, d_tol: float
    ) -> VisibilityCertificate:
        cache_file = self._get_cache_file(ch, p, d_tol)
        if not cache_file.exists():
            raise CertificateNotFound
        with open(cache_file, "r", encoding="utf-8") as f:
            obj = json.load(f)
        cert = VisibilityCertificate.from_json(obj, ch)
        logging.debug(f"Loaded certificate from {cache_file}.")
        return cert

    def save(
        self, ch: Channel, p: Point, d_tol: float, cert: VisibilityCertificate
    ) -> None:
        cache_file = self._get_cache_file(ch, p, d_tol)
        with open(cache_file, "w", encoding="utf-8") as f:
            json.dump(cert.to_json(), f)
        logging.debug(f"Saved certificate to {cache_file}.")


class SQLite3CertificateCache(CertificateCache):
    """A cache that uses a SQLite3 database."""

    def __init__(self, database_path: Path) -> None:
        self._database_path = database_path
        self._database_path.parent.mkdir(parents=True, exist_ok=True)
        self._initialized = False

    def _ensure_initialized(self) -> None:
        if self._initialized:
            return
        with sqlite3.connect(self._database_path) as conn:
            conn.execute(
                """
                CREATE TABLE IF NOT EXISTS certificates (
                    query_key TEXT PRIMARY KEY,
                    visible INTEGER NOT NULL,
                    certificate TEXT NOT NULL
                )
            """
            )
            conn.commit()
        self._initialized = True

    def try_load_certificate(
        self, ch: Channel, p: Point, d_tol: float
    ) -> VisibilityCertificate:
        self._ensure_initialized()
        key = query_key(ch, p, d_tol)
        with sqlite3.connect(self._database_path) as conn:
            cursor = conn.execute(
                "SELECT certificate FROM certificates WHERE query_key = ?",
                (key,),
            )
            result = cursor.fetchone()
        if result is None:
            raise CertificateNotFound
        cert = VisibilityCertificate.from_json(json.loads(result[0]), ch)
        logging.debug(f"Loaded certificate from SQLite for query key {key}.")
        return cert

    def save(
        self, ch: Channel, p: Point, d_tol: float, cert: VisibilityCertificate
    ) -> None:
        self._ensure_initialized()
        key = query_key(ch, p, d_tol)
        with sqlite3.connect(self._database_path) as conn:
            conn.execute(
                "INSERT OR REPLACE INTO certificates "
                "(query_key, visible, certificate) VALUES (?, ?, ?)",
                (key, int(cert.visible), json.dumps(cert.to_json())),
            )
            conn.commit()
        logging.debug(f"Saved certificate to SQLite database for query key {key}.")
