"""Load and save protocol configurations as INI text.

Sections mirror the config dataclasses: [code] for the wiretap code,
[protocol] for session parameters, [check_channel] and [data_channel]
for the two loss/noise models.  Any missing section or key falls back
to the built-in default; unknown keys are rejected so that typos fail
loudly instead of silently running the nominal setup.
"""

from __future__ import annotations

import configparser
import io
from pathlib import Path

from qsdc.protocol import CodeParams, ProtocolConfig
from qsdc.states import ChannelParams

_CODE_KEYS = {"l": int, "k_u": int, "k_r": int, "n_spread": int, "seed": int}
_CHANNEL_KEYS = {"loss_db": float, "flip_prob": float}
_PROTOCOL_KEYS = {
    "block_pulses": int,
    "check_fraction": float,
    "forward_check_fraction": float,
    "abort_threshold_capacity": float,
    "g_back_channel_db": float,
    "e_margin": float,
    "enforce_code_budget": bool,
    "confidence_delta": float,
    "repetition_rate_hz": float,
    "max_block_retries": int,
}
_SECTIONS = {
    "code": _CODE_KEYS,
    "protocol": _PROTOCOL_KEYS,
    "check_channel": _CHANNEL_KEYS,
    "data_channel": _CHANNEL_KEYS,
}


def _parse_section(parser: configparser.ConfigParser, section: str) -> dict:
    known = _SECTIONS[section]
    out: dict = {}
    if not parser.has_section(section):
        return out
    for key, raw in parser.items(section):
        if key not in known:
            raise ValueError(f"unknown key '{key}' in section [{section}]")
        kind = known[key]
        if kind is bool:
            out[key] = parser.getboolean(section, key)
        elif key == "confidence_delta" and raw.strip().lower() in ("", "none"):
            out[key] = None
        else:
            out[key] = kind(raw)
    return out


def parse_config(text: str) -> ProtocolConfig:
    parser = configparser.ConfigParser()
    parser.read_string(text)
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ValueError(f"unknown section [{section}]")
    kwargs: dict = dict(_parse_section(parser, "protocol"))
    code_kwargs = _parse_section(parser, "code")
    if code_kwargs:
        kwargs["code"] = CodeParams(**code_kwargs)
    for section, field in (("check_channel", "check_channel"), ("data_channel", "data_channel")):
        chan_kwargs = _parse_section(parser, section)
        if chan_kwargs:
            kwargs[field] = ChannelParams(**chan_kwargs)
    return ProtocolConfig(**kwargs)


def load_config(path: str | Path) -> ProtocolConfig:
    return parse_config(Path(path).read_text())


def render_config(config: ProtocolConfig) -> str:
    parser = configparser.ConfigParser()
    parser["code"] = {k: str(getattr(config.code, k)) for k in _CODE_KEYS}
    parser["protocol"] = {
        k: ("" if getattr(config, k) is None else str(getattr(config, k)))
        for k in _PROTOCOL_KEYS
    }
    for section, chan in (("check_channel", config.check_channel), ("data_channel", config.data_channel)):
        parser[section] = {k: str(getattr(chan, k)) for k in _CHANNEL_KEYS}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def save_config(config: ProtocolConfig, path: str | Path) -> None:
    Path(path).write_text(render_config(config))
