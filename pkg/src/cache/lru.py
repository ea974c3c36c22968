from collections import OrderedDict


class CacheState:

    def __init__(self, owner: int, capacity: int):
        """LRU set of resident blocks of one processor, `capacity` blocks large."""
        if capacity < 1:
            raise ValueError('cache must hold at least one block')
        self.owner = owner
        self.capacity = capacity
        self.misses = 0
        self.cold_misses = 0
        self.invalidation_misses = 0
        self.__resident: 'OrderedDict[int, None]' = OrderedDict()
        self.__seen = set()
        self.__invalidated = set()

    def access(self, block: int) -> bool:
        """Touches `block`; returns True on a hit."""
        if block in self.__resident:
            self.__resident.move_to_end(block)
            return True
        self.misses += 1
        if block not in self.__seen:
            self.cold_misses += 1
            self.__seen.add(block)
        elif block in self.__invalidated:
            self.invalidation_misses += 1
        self.__invalidated.discard(block)
        if len(self.__resident) >= self.capacity:
            # the least recently used block sits first
            self.__resident.popitem(last=False)
        self.__resident[block] = None
        return False

    def invalidate(self, block: int) -> bool:
        """Drops `block` after a write elsewhere; True when it was resident."""
        if block in self.__resident:
            del self.__resident[block]
            self.__invalidated.add(block)
            return True
        return False

    def __contains__(self, block: int) -> bool:
        return block in self.__resident

    def __len__(self) -> int:
        return len(self.__resident)

    @property
    def capacity_misses(self) -> int:
        return self.misses - self.cold_misses - self.invalidation_misses

    def __repr__(self) -> str:
        return f'CacheState(owner={self.owner}, resident={len(self.__resident)}/{self.capacity}, misses={self.misses})'
