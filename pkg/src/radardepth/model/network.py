"""Patch-embedding vision transformer with a dual-channel depth head.

The input embedding is split into a 3-channel RGB convolution and a separate
1-channel radar convolution whose outputs are summed; mathematically this is
one 4-channel convolution, but it keeps the radar slice a standalone
parameter so it can carry its own learning rate and be zeroed for ablations.
The decoder upsamples token features back to full resolution and ends in two
1x1 convolutions: the depth head and the fusion-weight head.
"""

import math
from dataclasses import replace

import torch
import torch.nn as nn

from .config import ModelConfig

INIT_STD = 0.02
NEW_CHANNEL_INIT_SCALE = 0.01  # new-slice std = this fraction of the pretrained RMS
NEW_PARAM_NAMES = ("radar_embed.weight", "w_conv.weight", "w_conv.bias")

# Head biases at init: d0 starts near a plausible scene depth instead of
# max_depth/2, and w starts trusting the depth head. Without the w bias the
# weight head (trained at the high learning rate) races to zero early, which
# gates the depth head's gradient and freezes training at the radar-mean
# predictor.
D0_BIAS_INIT = -1.4  # sigmoid(-1.4) * 100 m ~= 20 m
W_BIAS_INIT = 2.2    # sigmoid(2.2) ~= 0.9

# The fusion-weight logit is soft-bounded before the sigmoid. An unbounded
# logit saturates hard at w = 0 in early training (the radar mean beats an
# immature depth head everywhere), after which sigmoid'(logit) ~ 0 makes the
# gate irrecoverable even once the depth head improves.
W_LOGIT_RANGE = 4.0


class TransformerBlock(nn.Module):
    def __init__(self, dim, num_heads, mlp_ratio=4):
        super().__init__()
        self.norm1 = nn.LayerNorm(dim)
        self.num_heads = num_heads
        self.head_dim = dim // num_heads
        self.qkv = nn.Linear(dim, dim * 3)
        self.proj = nn.Linear(dim, dim)
        self.norm2 = nn.LayerNorm(dim)
        self.mlp = nn.Sequential(
            nn.Linear(dim, dim * mlp_ratio),
            nn.GELU(),
            nn.Linear(dim * mlp_ratio, dim),
        )

    def forward(self, x):
        b, n, c = x.shape
        h = self.norm1(x)
        qkv = self.qkv(h).reshape(b, n, 3, self.num_heads, self.head_dim).permute(2, 0, 3, 1, 4)
        q, k, v = qkv[0], qkv[1], qkv[2]
        attn = (q @ k.transpose(-2, -1)) * (self.head_dim ** -0.5)
        attn = attn.softmax(dim=-1)
        h = (attn @ v).transpose(1, 2).reshape(b, n, c)
        x = x + self.proj(h)
        x = x + self.mlp(self.norm2(x))
        return x


class UpsampleStage(nn.Module):
    def __init__(self, in_ch, out_ch):
        super().__init__()
        self.up = nn.Upsample(scale_factor=2, mode="bilinear", align_corners=False)
        self.conv = nn.Conv2d(in_ch, out_ch, kernel_size=3, padding=1)
        self.act = nn.GELU()

    def forward(self, x):
        return self.act(self.conv(self.up(x)))


class FusionDepthNet(nn.Module):
    """Backbone + decoder. Output heads: metric depth d0 and fusion weight w."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        e = config.embed_dim
        self.rgb_embed = nn.Conv2d(3, e, kernel_size=config.patch_size, stride=config.patch_size)
        if config.input_channels == 4:
            self.radar_embed = nn.Conv2d(1, e, kernel_size=config.patch_size,
                                         stride=config.patch_size, bias=False)
        else:
            self.radar_embed = None
        self.pos_embed = nn.Parameter(torch.zeros(1, config.tokens, e))
        self.blocks = nn.ModuleList(
            TransformerBlock(e, config.num_heads) for _ in range(config.num_blocks)
        )
        self.norm = nn.LayerNorm(e)

        n_up = int(math.log2(config.patch_size))
        stages = []
        ch = e
        for _ in range(n_up):
            nxt = max(ch // 2, 16)
            stages.append(UpsampleStage(ch, nxt))
            ch = nxt
        self.decoder = nn.Sequential(*stages)
        self.d0_conv = nn.Conv2d(ch, 1, kernel_size=1)
        if config.output_channels == 2:
            self.w_conv = nn.Conv2d(ch, 1, kernel_size=1)
        else:
            self.w_conv = None

    def forward(self, x):
        """x: (B, C, H, W), RGB in [0, 1] and radar depth in meters (>= 0).

        Returns (d0, w): each (B, H, W); w is None for single-head configs.
        """
        b, c, h, w_px = x.shape
        cfg = self.config
        if c != cfg.input_channels:
            raise ValueError(f"expected {cfg.input_channels} input channels, got {c}")
        if h % cfg.patch_size or w_px % cfg.patch_size:
            raise ValueError(f"input {h}x{w_px} not divisible by patch size {cfg.patch_size}")
        if (h, w_px) != cfg.image_size:
            raise ValueError(f"input {h}x{w_px} does not match configured size {cfg.image_size}")

        feat = self.rgb_embed(x[:, :3])
        if self.radar_embed is not None:
            radar = x[:, 3:4]
            if bool((radar.detach() < 0).any()):
                raise ValueError("radar channel must be >= 0")
            feat = feat + self.radar_embed(radar / cfg.max_depth)
        gh, gw = feat.shape[2], feat.shape[3]
        tokens = feat.flatten(2).transpose(1, 2) + self.pos_embed
        for block in self.blocks:
            tokens = block(tokens)
        tokens = self.norm(tokens)
        feat = tokens.transpose(1, 2).reshape(b, cfg.embed_dim, gh, gw)
        feat = self.decoder(feat)

        d0 = cfg.max_depth * torch.sigmoid(self.d0_conv(feat).squeeze(1))
        if self.w_conv is not None:
            raw = self.w_conv(feat).squeeze(1)
            w = torch.sigmoid(W_LOGIT_RANGE * torch.tanh(raw / W_LOGIT_RANGE))
        else:
            w = None
        return d0, w


def build_model(config: ModelConfig, seed=0) -> FusionDepthNet:
    """Deterministically initialized model."""
    model = FusionDepthNet(config)
    gen = torch.Generator().manual_seed(int(seed))
    with torch.no_grad():
        for name, p in model.named_parameters():
            if p.ndim == 1:
                if name.endswith(".weight"):  # layer norms
                    p.fill_(1.0)
                else:
                    p.zero_()
            else:
                p.normal_(0.0, INIT_STD, generator=gen)
        model.d0_conv.bias.fill_(D0_BIAS_INIT)
        if model.w_conv is not None:
            model.w_conv.bias.fill_(W_BIAS_INIT)
    return model


def extend_patch_embedding(weights_3ch, init_seed):
    """Widen a 3-channel patch-embedding weight to 4 channels.

    The RGB slices are copied bit-exact; the new slice is zero-mean normal
    with std NEW_CHANNEL_INIT_SCALE times the RMS of the pretrained slices.
    """
    w = torch.as_tensor(weights_3ch)
    if w.ndim != 4 or w.shape[1] != 3:
        raise ValueError(f"expected (out, 3, k, k) weights, got shape {tuple(w.shape)}")
    rms = float(w.double().pow(2).mean().sqrt())
    gen = torch.Generator().manual_seed(int(init_seed))
    new_slice = torch.empty(w.shape[0], 1, w.shape[2], w.shape[3], dtype=w.dtype)
    new_slice.normal_(0.0, NEW_CHANNEL_INIT_SCALE * rms, generator=gen)
    return torch.cat([w.clone(), new_slice], dim=1)


def extend_from_stub(stub: FusionDepthNet, init_seed) -> FusionDepthNet:
    """Turn a 3-channel single-head model into the 4-channel dual-head one.

    All pretrained parameters are copied bit-exact; the radar embedding slice
    and the weight head are freshly initialized.
    """
    if stub.config.input_channels != 3:
        raise ValueError("stub must be a 3-channel model")
    config = replace(stub.config, input_channels=4, output_channels=2)
    model = build_model(config, seed=int(init_seed))
    stub_state = stub.state_dict()
    with torch.no_grad():
        for name, p in model.named_parameters():
            if name in stub_state:
                p.copy_(stub_state[name])
        extended = extend_patch_embedding(stub.rgb_embed.weight.detach(), init_seed)
        model.radar_embed.weight.copy_(extended[:, 3:4])
        rms = float(stub.d0_conv.weight.detach().double().pow(2).mean().sqrt())
        gen = torch.Generator().manual_seed(int(init_seed) + 1)
        model.w_conv.weight.normal_(0.0, NEW_CHANNEL_INIT_SCALE * rms, generator=gen)
        model.w_conv.bias.fill_(W_BIAS_INIT)
    return model


def param_groups(model: FusionDepthNet):
    """Partition parameters into (pretrained, new).

    "New" covers the radar embedding slice and the weight head: everything
    that does not exist in a 3-channel single-head model.
    """
    pretrained, new = [], []
    for name, p in model.named_parameters():
        (new if name in NEW_PARAM_NAMES else pretrained).append(p)
    return pretrained, new


def param_group_names(model: FusionDepthNet):
    pretrained, new = [], []
    for name, _ in model.named_parameters():
        (new if name in NEW_PARAM_NAMES else pretrained).append(name)
    return pretrained, new


def zero_radar_embedding(model: FusionDepthNet):
    """Zero the radar slice; the forward pass then ignores the radar channel."""
    if model.radar_embed is None:
        raise ValueError("model has no radar embedding")
    with torch.no_grad():
        model.radar_embed.weight.zero_()
