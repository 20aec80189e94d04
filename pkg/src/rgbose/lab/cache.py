import os
import logging
from functools import wraps
from typing import Any, Callable, Dict, Optional

from diskcache import Cache

from ..config import CACHE_DIR, CACHE_ENABLED

logger = logging.getLogger(__name__)

_MISS = object()


class QuadratureCache:
    """
    A disk-based memo for expensive quadrature results.
    Uses diskcache for persistent storage between runs. Values never expire:
    a key fully determines the integral, so a replay is an exact result.
    """
    def __init__(self, cache_dir=CACHE_DIR, enabled: bool = CACHE_ENABLED):
        """
        Initialize the cache.

        Args:
            cache_dir: Directory to store cache files
            enabled: When False every lookup is a miss and nothing is stored
        """
        self.cache_dir = cache_dir
        self.enabled = enabled
        self._cache: Optional[Cache] = None

    @property
    def cache(self) -> Cache:
        if self._cache is None:
            os.makedirs(self.cache_dir, exist_ok=True)
            self._cache = Cache(str(self.cache_dir))
        return self._cache

    def get_or_compute(self, key: str, compute_func: Callable[[], Any]) -> Any:
        """
        Get from cache or compute and store the value.

        Args:
            key: Cache key
            compute_func: Function called on a miss

        Returns:
            Cached or freshly computed value
        """
        if not self.enabled:
            return compute_func()

        value = self.cache.get(key, default=_MISS)
        if value is not _MISS:
            logger.debug(f"Cache hit: {key}")
            return value

        value = compute_func()
        self.cache[key] = value
        return value

    def clear(self, key: Optional[str] = None) -> None:
        """
        Clear cache entries.

        Args:
            key: Specific key to clear, or all cache if None
        """
        if key is None:
            self.cache.clear()
        elif key in self.cache:
            del self.cache[key]

    def get_stats(self) -> Dict[str, Any]:
        """Get cache statistics."""
        if not self.enabled:
            return {"enabled": False}
        return {
            "enabled": True,
            "size": len(self.cache),
            "directory": str(self.cache.directory),
        }


# Create a singleton instance
cache = QuadratureCache()


def cached(key_prefix: str):
    """
    Decorator for memoising deterministic numerical functions.

    Args:
        key_prefix: Prefix for cache key

    Returns:
        Decorator function
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            key_parts = [key_prefix, func.__name__]
            if args:
                key_parts.append(repr(args))
            if kwargs:
                # Sort kwargs by key for consistent cache keys
                key_parts.append(repr(sorted(kwargs.items())))
            cache_key = "_".join(key_parts)
            return cache.get_or_compute(cache_key, lambda: func(*args, **kwargs))

        return wrapper
    return decorator
