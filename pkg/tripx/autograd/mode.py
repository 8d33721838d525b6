from contextlib import contextmanager
from typing import Iterator


class Autograd:

    _recording = True

    @classmethod
    def enabled(cls) -> bool:
        return cls._recording


@contextmanager
def nograd() -> Iterator[None]:
    previous = Autograd._recording
    Autograd._recording = False
    try:
        yield
    finally:
        Autograd._recording = previous
