"""
Enumeration Cache Module

Caches the strict plane partitions of bounded volume, with their volume
and alternation, for the brute-force oracle. Uses deterministic file paths
in the cache directory so repeated runs skip the enumeration.
"""

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Dict, List, Optional

from error_handler import CapExceeded, error_handler, safe_execute
from partitions import StrictPlanePartition, alternation, enumerate_spp
from settings import settings


@dataclass(frozen=True)
class EnumerationRecord:
    """One strict plane partition with its volume and alternation."""

    pi: StrictPlanePartition
    volume: int
    alternation: int

    def to_list(self) -> List[Any]:
        return [[list(row) for row in self.pi.rows], self.volume, self.alternation]

    @classmethod
    def from_list(cls, data: List[Any]) -> "EnumerationRecord":
        rows, volume, alt = data
        return cls(StrictPlanePartition(tuple(tuple(r) for r in rows)), int(volume), int(alt))


class EnumerationCache:
    """Manages the on-disk and in-process cache of enumeration records."""

    CACHE_VERSION = "1.0"
    CACHE_FILENAME = "spp_enumeration_v{volume}.json"

    def __init__(self, cache_dir: Optional[str] = None, enabled: Optional[bool] = None):
        """Initialize the cache in the configured directory."""
        self.cache_dir = cache_dir or settings.get("cache_dir")
        self.enabled = settings.get("cache_enabled") if enabled is None else enabled
        self._memory: Dict[int, List[EnumerationRecord]] = {}
        self._lock = threading.Lock()

    def cache_file_path(self, max_volume: int) -> str:
        return os.path.join(self.cache_dir, self.CACHE_FILENAME.format(volume=max_volume))

    @safe_execute("EnumerationCache.save", default=False)
    def save(self, max_volume: int, records: List[EnumerationRecord]) -> bool:
        """
        Save records to the cache file.

        Returns:
            bool: True if saved successfully, False otherwise
        """
        cache_data = {
            "max_volume": max_volume,
            "records": [r.to_list() for r in records],
            "cached_at": datetime.now().isoformat(),
            "version": self.CACHE_VERSION,
        }
        with open(self.cache_file_path(max_volume), "w", encoding="utf-8") as f:
            json.dump(cache_data, f)
        error_handler.log_debug(f"saved {len(records)} records", "EnumerationCache")
        return True

    @safe_execute("EnumerationCache.load", default=None)
    def load(self, max_volume: int) -> Optional[List[EnumerationRecord]]:
        """
        Load records from the cache file.

        Returns:
            List of records, None if no usable cache
        """
        path = self.cache_file_path(max_volume)
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as f:
            cache_data = json.load(f)

        # Validate cache structure
        if not isinstance(cache_data, dict) or cache_data.get("version") != self.CACHE_VERSION:
            return None
        if cache_data.get("max_volume") != max_volume or not isinstance(cache_data.get("records"), list):
            return None
        return [EnumerationRecord.from_list(item) for item in cache_data["records"]]

    @safe_execute("EnumerationCache.clear", default=False)
    def clear(self, max_volume: Optional[int] = None) -> bool:
        """Remove one cache file, or every file and the in-process memo when max_volume is None."""
        with self._lock:
            if max_volume is None:
                volumes = list(self._memory)
                self._memory.clear()
                prefix = self.CACHE_FILENAME.split("{")[0]
                for name in os.listdir(self.cache_dir):
                    if name.startswith(prefix) and name.endswith(".json"):
                        os.remove(os.path.join(self.cache_dir, name))
                error_handler.log_debug(f"cleared volumes {volumes}", "EnumerationCache")
            else:
                self._memory.pop(max_volume, None)
                path = self.cache_file_path(max_volume)
                if os.path.exists(path):
                    os.remove(path)
        return True

    @safe_execute("EnumerationCache.info", default=None)
    def info(self, max_volume: int) -> Optional[Dict[str, Any]]:
        """
        Get information about a cache file.

        Returns:
            Dict with cache metadata or None if no cache
        """
        path = self.cache_file_path(max_volume)
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as f:
            cache_data = json.load(f)
        return {
            "record_count": len(cache_data.get("records", [])),
            "cached_at": cache_data.get("cached_at"),
            "version": cache_data.get("version", "unknown"),
            "file_size": os.path.getsize(path),
        }

    def records(self, max_volume: int, cap: Optional[int] = None) -> List[EnumerationRecord]:
        """Every strict plane partition with |pi| <= max_volume, enumerated once per process."""
        cap = settings.get("enumeration_cap") if cap is None else cap
        if not 0 <= max_volume <= cap:
            raise CapExceeded(f"max_volume must lie in [0, {cap}], got {max_volume}")
        with self._lock:
            if max_volume in self._memory:
                return self._memory[max_volume]

            # A larger enumeration already in memory contains this one
            larger = [v for v in self._memory if v > max_volume]
            if larger:
                found = [r for r in self._memory[min(larger)] if r.volume <= max_volume]
            else:
                found = self.load(max_volume) if self.enabled else None
                if found is None:
                    found = [
                        EnumerationRecord(pi, pi.volume, alternation(pi))
                        for pi in enumerate_spp(max_volume, cap)
                    ]
                    error_handler.log_info(
                        f"enumerated {len(found)} strict plane partitions of volume <= {max_volume}",
                        "EnumerationCache",
                    )
                    if self.enabled:
                        self.save(max_volume, found)
            self._memory[max_volume] = found
            return found


enumeration_cache = EnumerationCache()
