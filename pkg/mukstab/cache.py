import threading
from abc import ABC, abstractmethod
from collections import OrderedDict
from enum import Enum


def init_cache(settings):
    if settings.cache_type is CacheType.memory:
        return MemoryCache(max_entries=settings.cache_size)
    if settings.cache_type is CacheType.disabled:
        return NullCache()
    raise NotImplementedError(f'Cache type {settings.cache_type} not implemented')


class CacheType(Enum):
    memory = 'memory'
    disabled = 'disabled'


class AbstractCache(ABC):
    @abstractmethod
    def set(self, key, value):
        pass

    @abstractmethod
    def get(self, key):
        pass

    @abstractmethod
    def clear(self):
        pass


class MemoryCache(AbstractCache):
    def __init__(self, max_entries=4096):
        self._cache = OrderedDict()
        self._max_entries = max_entries
        self._lock = threading.Lock()

    def set(self, key, value):
        with self._lock:
            self._cache[key] = value
            while len(self._cache) > self._max_entries:
                self._cache.popitem(last=False)

    def get(self, key):
        with self._lock:
            return self._cache.get(key)

    def clear(self):
        with self._lock:
            self._cache.clear()


class NullCache(AbstractCache):
    def set(self, key, value):
        pass

    def get(self, key):
        return None

    def clear(self):
        pass
