#!/usr/bin/env python3
"""Writes MAGW weight fixtures with an embedded parity pair, plus MAGF (M, H) pairs.

The reference forward pass is a float64 PyTorch FNO evaluated on float32-rounded weights.
"""
import argparse
import pathlib
import struct

import numpy as np
import torch

ACTIVATIONS = {"identity": 0, "gelu": 1, "gelu-tanh": 2, "relu": 3}


class SpectralConv2d(torch.nn.Module):
    def __init__(self, width, m1, m2):
        super().__init__()
        self.m1, self.m2 = m1, m2
        scale = 1.0 / width
        shape = (width, width, m1, m2)
        self.weights1 = torch.nn.Parameter(scale * torch.rand(shape, dtype=torch.cfloat))
        self.weights2 = torch.nn.Parameter(scale * torch.rand(shape, dtype=torch.cfloat))

    def forward(self, x):
        h, w = x.shape[-2:]
        x_ft = torch.fft.rfft2(x)
        out = torch.zeros(x.shape[0], self.weights1.shape[1], h, w // 2 + 1,
                          dtype=x_ft.dtype)
        m1, m2 = self.m1, self.m2
        out[:, :, :m1, :m2] = torch.einsum("bixy,ioxy->boxy", x_ft[:, :, :m1, :m2], self.weights1)
        out[:, :, -m1:, :m2] = torch.einsum("bixy,ioxy->boxy", x_ft[:, :, -m1:, :m2], self.weights2)
        return torch.fft.irfft2(out, s=(h, w))


class FNO2d(torch.nn.Module):
    def __init__(self, width, m1, m2, layers, activation):
        super().__init__()
        self.lift = torch.nn.Linear(3, width)
        self.spectral = torch.nn.ModuleList(SpectralConv2d(width, m1, m2) for _ in range(layers))
        self.local = torch.nn.ModuleList(torch.nn.Conv2d(width, width, 1) for _ in range(layers))
        self.proj = torch.nn.Linear(width, 3)
        self.activation = activation
        self.in_mean = torch.zeros(3)
        self.in_std = torch.ones(3)
        self.out_mean = torch.zeros(3)
        self.out_std = torch.ones(3)

    def act(self, x):
        if self.activation == "gelu":
            return torch.nn.functional.gelu(x)
        if self.activation == "gelu-tanh":
            return torch.nn.functional.gelu(x, approximate="tanh")
        if self.activation == "relu":
            return torch.relu(x)
        return x

    def forward(self, m):
        # m: (B, H, W, 3) in A/m
        x = (m - self.in_mean) / self.in_std
        x = self.lift(x).permute(0, 3, 1, 2)
        for i, (s, l) in enumerate(zip(self.spectral, self.local)):
            x = s(x) + l(x)
            if i + 1 < len(self.spectral):
                x = self.act(x)
        y = self.proj(x.permute(0, 2, 3, 1))
        return y * self.out_std + self.out_mean


def tensors(model):
    out = [("meta.activation", np.array([ACTIVATIONS[model.activation]], np.float32), 0)]
    out.append(("lift.weight", model.lift.weight, 0))
    out.append(("lift.bias", model.lift.bias, 0))
    for i, (s, l) in enumerate(zip(model.spectral, model.local)):
        out.append((f"blocks.{i}.spectral.weights1", s.weights1, 1))
        out.append((f"blocks.{i}.spectral.weights2", s.weights2, 1))
        out.append((f"blocks.{i}.local.weight", l.weight[:, :, 0, 0], 0))
        out.append((f"blocks.{i}.local.bias", l.bias, 0))
    out.append(("proj.weight", model.proj.weight, 0))
    out.append(("proj.bias", model.proj.bias, 0))
    out.append(("norm.in.mean", model.in_mean, 0))
    out.append(("norm.in.std", model.in_std, 0))
    out.append(("norm.out.mean", model.out_mean, 0))
    out.append(("norm.out.std", model.out_std, 0))
    return out


def to_numpy(t):
    if isinstance(t, np.ndarray):
        return t
    return t.detach().cpu().numpy()


def write_magw(path, model, parity_in, parity_out):
    ts = tensors(model)
    with open(path, "wb") as f:
        f.write(b"MAGW")
        f.write(struct.pack("<HI", 1, len(ts)))
        for name, t, dtype in ts:
            a = to_numpy(t)
            raw = name.encode()
            f.write(struct.pack("<H", len(raw)) + raw)
            f.write(struct.pack("<B", a.ndim))
            f.write(struct.pack(f"<{a.ndim}Q", *a.shape))
            f.write(struct.pack("<B", dtype))
            if dtype == 1:
                a = a.astype(np.complex64)
            else:
                a = a.astype(np.float32)
            f.write(np.ascontiguousarray(a).astype(a.dtype.newbyteorder("<")).tobytes())
        ny, nx = parity_in.shape[:2]
        f.write(b"PRTY")
        f.write(struct.pack("<II", nx, ny))
        for field in (parity_in, parity_out):
            planes = np.transpose(field, (2, 0, 1)).astype("<f4")
            f.write(np.ascontiguousarray(planes).tobytes())


def write_magf(path, m, h, cell):
    ny, nx = m.shape[:2]
    with open(path, "wb") as f:
        f.write(b"MAGF" + bytes([1, 1, 0, 0]))
        f.write(struct.pack("<3Q", nx, ny, 1))
        f.write(struct.pack("<6d", *cell, 0.0, 0.0, 0.0))
        f.write(struct.pack("<Q", 6))
        for field in (m, h):
            planes = np.transpose(field, (2, 0, 1)).astype("<f8")
            f.write(np.ascontiguousarray(planes).tobytes())


def random_m(gen, ny, nx, ms):
    v = torch.randn(ny, nx, 3, generator=gen, dtype=torch.float64)
    return ms * v / v.norm(dim=-1, keepdim=True)


def build(width, modes, layers, activation, seed, ms):
    torch.manual_seed(seed)
    model = FNO2d(width, modes, modes, layers, activation)
    s = ms / np.sqrt(3.0)
    model.in_std = torch.full((3,), s)
    model.out_mean = torch.tensor([0.01, -0.02, 0.03]) * ms
    model.out_std = torch.tensor([0.2, 0.25, 0.5]) * ms
    # Round everything to the stored precision, then evaluate in float64.
    for attr in ("in_mean", "in_std", "out_mean", "out_std"):
        setattr(model, attr, getattr(model, attr).float().double())
    for p in model.parameters():
        p.data = p.data.to(torch.complex128 if p.is_complex() else torch.float64)
    return model


def reference(model, m):
    x = torch.from_numpy(m.astype(np.float64))[None]
    with torch.no_grad():
        return model(x)[0].numpy()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="tests/fixtures")
    ap.add_argument("--seed", type=int, default=1234)
    ap.add_argument("--pairs", type=int, default=8)
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ms = 8.0e5
    gen = torch.Generator().manual_seed(args.seed)

    specs = [
        ("fno_160x40.magw", 32, 12, 4, "gelu", 160, 40),
        ("fno_tiny.magw", 4, 2, 2, "gelu-tanh", 10, 6),
    ]
    models = {}
    for name, width, modes, layers, act, nx, ny in specs:
        model = build(width, modes, layers, act, args.seed, ms)
        m = random_m(gen, ny, nx, ms).numpy().astype(np.float32)
        h = reference(model, m)
        write_magw(out / name, model, m, h.astype(np.float32))
        models[name] = model
        print(f"wrote {out / name}")

    pair_dir = out / "fno_parity"
    pair_dir.mkdir(exist_ok=True)
    model = models["fno_160x40.magw"]
    for k in range(args.pairs):
        m = random_m(gen, 40, 160, ms).numpy()
        h = reference(model, m)
        write_magf(pair_dir / f"pair_{k:02d}.magf", m, h, (5e-9, 5e-9, 3e-9))
    print(f"wrote {args.pairs} pairs to {pair_dir}")


if __name__ == "__main__":
    main()
