from .cache import CacheStore, close_cache, open_cache

__all__ = ["CacheStore", "open_cache", "close_cache"]
