"""Fall back to sync file operations if aiofiles is not installed."""

__all__ = ["aiexists", "aimakedirs", "aiopen", "write_text"]

import contextlib
import io
from collections.abc import AsyncIterator
from pathlib import Path
from types import TracebackType
from typing import Self

try:
    import aiofiles.os
    from aiofiles import open as aiopen

    aiexists = aiofiles.os.path.exists
    aimakedirs = aiofiles.os.makedirs
except ImportError:
    import os

    class AsyncFile:
        """Async file wrapper.

        Args:
            file: The file object to wrap
        """

        def __init__(self, file: io.TextIOWrapper) -> None:
            self.file = file

        async def read(self) -> str:
            """Read the whole file."""
            return self.file.read()

        async def write(self, data: str) -> int:
            """Write `data`."""
            return self.file.write(data)

        async def __aenter__(self) -> Self:
            return self

        async def __aexit__(
            self,
            exc_type: type[BaseException] | None,
            exc_val: BaseException | None,
            exc_tb: TracebackType | None,
        ) -> None:
            self.file.close()

    @contextlib.asynccontextmanager  # type: ignore[no-redef, unused-ignore]
    async def aiopen(*args, **kwargs) -> AsyncIterator[AsyncFile]:
        """Async > sync wrapper."""
        with open(*args, **kwargs) as f:  # noqa: ASYNC230, pylint: disable=unspecified-encoding
            yield AsyncFile(f)

    async def aiexists(*args, **kwargs) -> bool:
        """Async > sync wrapper."""
        return os.path.exists(*args, **kwargs)

    async def aimakedirs(*args, **kwargs) -> None:  # type: ignore[no-redef, unused-ignore]
        """Async > sync wrapper."""
        os.makedirs(*args, **kwargs)


async def write_text(path: str | Path, text: str) -> None:
    """Write `text` to `path`, creating parent directories."""
    await aimakedirs(Path(path).parent, exist_ok=True)
    async with aiopen(path, "w", encoding="utf-8", newline="") as f:
        await f.write(text)
