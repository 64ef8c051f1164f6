from threading import Lock
from typing import Callable, Hashable, Optional, TypeVar

from cachetools import LRUCache

from ..config import get_settings
from ..logger import get_logger

config = get_settings()
logger = get_logger("assembly.cache")

ValueT = TypeVar("ValueT")


class ScatterCache:
    """Scattering-result database.

    Holds computed outcome distributions and the outcomes selected from them, so
    an elementary scattering with its following measurement is computed once.
    Computing a key holds only that key's lock, distinct keys compute concurrently.
    """

    def __init__(self, maxsize: int = config.ASSEMBLY_CACHE_SIZE) -> None:
        self.distributions: LRUCache = LRUCache(maxsize=maxsize)
        self.selections: LRUCache = LRUCache(maxsize=maxsize)
        self.computations = 0
        self.hits = 0
        self._lock = Lock()
        self._key_locks: dict[tuple[int, Hashable], Lock] = {}

    def __len__(self) -> int:
        return len(self.distributions) + len(self.selections)

    def _fetch(
        self,
        store: LRUCache,
        key: Hashable,
        compute: Callable[[], ValueT],
        counted: bool,
    ) -> ValueT:
        _slot = (id(store), key)
        with self._lock:
            _value: Optional[ValueT] = store.get(key)
            if _value is not None:
                self.hits += 1
                return _value
            _key_lock = self._key_locks.setdefault(_slot, Lock())

        with _key_lock:
            with self._lock:
                # computed by another thread while we waited
                _value = store.get(key)
                if _value is not None:
                    self.hits += 1
                    return _value
            _value = compute()
            with self._lock:
                store[key] = _value
                self._key_locks.pop(_slot, None)
                if counted:
                    self.computations += 1
        return _value

    def distribution(self, key: Hashable, compute: Callable[[], ValueT]) -> ValueT:
        """Memoized scattering result."""
        return self._fetch(self.distributions, key, compute, counted=True)

    def selection(self, key: Hashable, compute: Callable[[], ValueT]) -> ValueT:
        """Memoized outcome selection."""
        return self._fetch(self.selections, key, compute, counted=False)

    def clear(self) -> None:
        with self._lock:
            self.distributions.clear()
            self.selections.clear()
            self.computations = 0
            self.hits = 0
        logger.debug("Scatter cache cleared")
