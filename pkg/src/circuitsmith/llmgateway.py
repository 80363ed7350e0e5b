"""Provider-agnostic completions with deterministic record/replay.

Every completion is keyed by a digest of (prompt text, generation params).
Replay providers serve recorded responses for digests with no network at
all, which makes the whole pipeline testable offline and byte-reproducible.
Record providers call a transport once per novel digest and append to a
JSONL transcript; repeated identical calls are served from the transcript.

Live transports are config-driven request templates (endpoint, header map,
JSON body template with ``$prompt``-style placeholders, and a dotted path
to the response text) rather than per-vendor code.  Credentials come from
environment variables named in the config and are never written anywhere.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from configparser import ConfigParser
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Mapping

DEFAULT_MODEL_ID = "offline-replay"


class ReplayMiss(KeyError):
    """The replay transcript has no entry for this prompt digest."""

    def __init__(self, digest: str):
        self.digest = digest
        super().__init__(f"no transcript entry for digest {digest}")

    def __str__(self) -> str:  # KeyError quotes its arg; keep the message readable
        return f"no transcript entry for digest {self.digest}"


class TransportError(RuntimeError):
    """The request never produced a usable HTTP response."""


class ProviderError(RuntimeError):
    """The provider answered, but with an error status or unusable body."""

    def __init__(self, status: int, body: str, message: str | None = None):
        self.status = status
        self.body = body
        super().__init__(message or f"provider returned status {status}")


class UnknownTokenizer(KeyError):
    pass


@dataclass(frozen=True)
class GenerationParams:
    model_id: str = DEFAULT_MODEL_ID
    temperature: float = 0.0  # greedy decoding by default
    max_tokens: int = 4096
    stop_sequences: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "model_id": self.model_id,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "stop_sequences": list(self.stop_sequences),
        }


def prompt_digest(prompt: str, params: GenerationParams) -> str:
    """Collision-resistant digest of the exact prompt bytes and parameters."""
    payload = json.dumps(
        {"prompt": prompt, "params": params.to_json()},
        sort_keys=True,
        ensure_ascii=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class TranscriptEntry:
    prompt_digest: str
    prompt_text: str
    response_text: str
    params: dict[str, Any]
    timestamp: str

    def to_json(self) -> dict[str, Any]:
        return {
            "prompt_digest": self.prompt_digest,
            "prompt_text": self.prompt_text,
            "response_text": self.response_text,
            "params": self.params,
            "timestamp": self.timestamp,
        }


def load_transcript(path: str | Path) -> list[TranscriptEntry]:
    """Read a JSONL transcript; one entry per line, in append order."""
    entries = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TransportError(f"cannot read transcript {path}: {exc}") from exc
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            entries.append(
                TranscriptEntry(
                    prompt_digest=row["prompt_digest"],
                    prompt_text=row["prompt_text"],
                    response_text=row["response_text"],
                    params=row["params"],
                    timestamp=row["timestamp"],
                )
            )
        except (json.JSONDecodeError, KeyError) as exc:
            raise TransportError(f"bad transcript line {line_no} in {path}: {exc}") from exc
    return entries


Transport = Callable[[str, GenerationParams], str]


class Provider:
    """A completion source in one of three modes: replay, record, or live."""

    def __init__(
        self,
        name: str,
        mode: str,
        transport: Transport | None = None,
        transcript_path: str | Path | None = None,
    ):
        if mode not in ("replay", "record", "live"):
            raise ValueError(f"unknown provider mode {mode!r}")
        if mode in ("record", "live") and transport is None:
            raise ValueError(f"{mode} mode needs a transport")
        if mode in ("replay", "record") and transcript_path is None:
            raise ValueError(f"{mode} mode needs a transcript path")
        self.name = name
        self.mode = mode
        self._transport = transport
        self.transcript_path = Path(transcript_path) if transcript_path else None
        self._lock = threading.Lock()
        self._index: dict[str, TranscriptEntry] = {}
        if mode == "replay" or (mode == "record" and self.transcript_path.exists()):
            for entry in load_transcript(self.transcript_path):
                self._index[entry.prompt_digest] = entry

    @classmethod
    def replay(cls, transcript_path: str | Path, name: str = "replay") -> "Provider":
        return cls(name=name, mode="replay", transcript_path=transcript_path)

    @classmethod
    def recording(
        cls, transport: Transport, transcript_path: str | Path, name: str = "record"
    ) -> "Provider":
        return cls(name=name, mode="record", transport=transport, transcript_path=transcript_path)

    @classmethod
    def live(cls, transport: Transport, name: str = "live") -> "Provider":
        return cls(name=name, mode="live", transport=transport)

    def complete(self, prompt: str, params: GenerationParams | None = None) -> str:
        params = params or GenerationParams()
        digest = prompt_digest(prompt, params)
        if self.mode == "replay":
            entry = self._index.get(digest)
            if entry is None:
                raise ReplayMiss(digest)
            return entry.response_text
        if self.mode == "live":
            return self._transport(prompt, params)
        # record: serve novel digests live and append exactly once
        with self._lock:
            cached = self._index.get(digest)
            if cached is not None:
                return cached.response_text
        response = self._transport(prompt, params)
        entry = TranscriptEntry(
            prompt_digest=digest,
            prompt_text=prompt,
            response_text=response,
            params=params.to_json(),
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        with self._lock:
            if digest not in self._index:
                self._index[digest] = entry
                self.transcript_path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.transcript_path, "a", encoding="utf-8") as handle:
                    handle.write(json.dumps(entry.to_json(), ensure_ascii=True) + "\n")
        return entry.response_text

    def timestamp_for(self, digest: str) -> str | None:
        """Recorded timestamp for a digest, used for reproducible provenance."""
        entry = self._index.get(digest)
        return entry.timestamp if entry else None

    def entry_count(self) -> int:
        return len(self._index)


# --- config-driven live transports ----------------------------------------------

_PLACEHOLDER = re.compile(r"\$(prompt|model_id|temperature|max_tokens|stop_sequences)\b")


class HttpTransport:
    """POST a templated JSON body and pull the response text out by dotted path."""

    def __init__(
        self,
        endpoint: str,
        body_template: str,
        response_path: str,
        headers: Mapping[str, str] | None = None,
        timeout: float = 120.0,
    ):
        self.endpoint = endpoint
        self.body_template = body_template
        self.response_path = response_path
        self.headers = dict(headers or {})
        self.timeout = timeout

    def render_body(self, prompt: str, params: GenerationParams) -> str:
        values = {
            "prompt": prompt,
            "model_id": params.model_id,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
            "stop_sequences": list(params.stop_sequences),
        }
        return _PLACEHOLDER.sub(lambda m: json.dumps(values[m.group(1)]), self.body_template)

    def __call__(self, prompt: str, params: GenerationParams) -> str:
        import httpx

        body = self.render_body(prompt, params)
        try:
            response = httpx.post(
                self.endpoint,
                content=body,
                headers={"Content-Type": "application/json", **self.headers},
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise TransportError(f"request to {self.endpoint} failed: {exc}") from exc
        if response.status_code >= 400:
            raise ProviderError(response.status_code, response.text)
        try:
            return extract_path(response.json(), self.response_path)
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(
                response.status_code,
                response.text,
                f"cannot extract {self.response_path!r} from response: {exc}",
            ) from exc


def extract_path(payload: Any, dotted: str) -> str:
    """Walk ``choices.0.text``-style paths through parsed JSON."""
    node = payload
    for token in dotted.split("."):
        if isinstance(node, list):
            node = node[int(token)]
        elif isinstance(node, Mapping):
            node = node[token]
        else:
            raise KeyError(token)
    if not isinstance(node, str):
        raise ValueError(f"path {dotted!r} did not land on a string")
    return node


def load_providers(config_path: str | Path) -> dict[str, Provider]:
    """Read a providers.conf document (INI key/value sections, one per provider).

    Keys: ``mode`` (replay|record|live), ``transcript`` (replay/record),
    ``endpoint``, ``body_template``, ``response_path``, ``auth_env``,
    ``auth_header``, ``auth_scheme`` (live/record).  Relative transcript
    paths resolve against the config file's directory.  The credential is
    read from the named environment variable at call time and never stored.
    """
    config_path = Path(config_path)
    parser = ConfigParser()
    read = parser.read(config_path, encoding="utf-8")
    if not read:
        raise TransportError(f"cannot read providers config {config_path}")
    providers: dict[str, Provider] = {}
    for name in parser.sections():
        section = parser[name]
        mode = section.get("mode", "live")
        transcript = section.get("transcript")
        if transcript is not None:
            transcript = str((config_path.parent / transcript).resolve())
        transport: Transport | None = None
        if mode in ("record", "live"):
            headers = {}
            auth_env = section.get("auth_env")
            if auth_env:
                credential = os.environ.get(auth_env)
                if credential is None:
                    raise TransportError(
                        f"provider {name!r} expects credential in ${auth_env}, which is unset"
                    )
                scheme = section.get("auth_scheme", "Bearer")
                header = section.get("auth_header", "Authorization")
                headers[header] = f"{scheme} {credential}".strip()
            transport = HttpTransport(
                endpoint=section["endpoint"],
                body_template=section.get(
                    "body_template",
                    '{"model": $model_id, "prompt": $prompt, "temperature": $temperature,'
                    ' "max_tokens": $max_tokens, "stop": $stop_sequences}',
                ),
                response_path=section.get("response_path", "text"),
                headers=headers,
            )
        providers[name] = Provider(
            name=name, mode=mode, transport=transport, transcript_path=transcript
        )
    return providers


# --- approximate tokenizers ------------------------------------------------------

_WORDPUNCT = re.compile(r"\w+|[^\w\s]")

_TOKENIZERS: dict[str, Callable[[str], int]] = {
    "whitespace": lambda text: len(text.split()),
    "wordpunct": lambda text: len(_WORDPUNCT.findall(text)),
}


def count_prompt_tokens(prompt: str, tokenizer_id: str = "wordpunct") -> int:
    """Deterministic approximate token count.

    These are bundled approximations (whitespace split, or words plus
    punctuation marks), suitable for budget checks and regression pins,
    not for exact billing math.
    """
    try:
        tokenizer = _TOKENIZERS[tokenizer_id]
    except KeyError:
        raise UnknownTokenizer(tokenizer_id) from None
    return tokenizer(prompt)
