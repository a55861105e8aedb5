"""Model hyperparameters and desk-scale presets."""

from dataclasses import dataclass, field

PRESETS = {
    "toy-S": dict(embed_dim=64, num_blocks=4, num_heads=4),
    "toy-B": dict(embed_dim=128, num_blocks=6, num_heads=8),
}

DEFAULT_MAX_DEPTH_M = 100.0


@dataclass(frozen=True)
class ModelConfig:
    patch_size: int = 8
    embed_dim: int = 64
    num_heads: int = 4
    num_blocks: int = 4
    input_channels: int = 4
    output_channels: int = 2
    max_depth: float = DEFAULT_MAX_DEPTH_M
    image_size: tuple = (64, 64)  # (height, width)

    def __post_init__(self):
        if self.embed_dim % self.num_heads != 0:
            raise ValueError(f"embed_dim {self.embed_dim} not divisible by num_heads {self.num_heads}")
        if self.input_channels not in (3, 4):
            raise ValueError(f"input_channels must be 3 or 4, got {self.input_channels}")
        if self.output_channels not in (1, 2):
            raise ValueError(f"output_channels must be 1 or 2, got {self.output_channels}")
        if self.max_depth <= 0:
            raise ValueError(f"max_depth must be positive, got {self.max_depth}")
        h, w = self.image_size
        if h % self.patch_size or w % self.patch_size:
            raise ValueError(f"image size {self.image_size} not divisible by patch {self.patch_size}")
        if self.patch_size & (self.patch_size - 1):
            raise ValueError(f"patch_size must be a power of two, got {self.patch_size}")
        object.__setattr__(self, "image_size", (int(h), int(w)))

    @property
    def tokens(self) -> int:
        h, w = self.image_size
        return (h // self.patch_size) * (w // self.patch_size)


def preset_config(name, image_size=(64, 64), patch_size=8,
                  max_depth=DEFAULT_MAX_DEPTH_M, input_channels=4,
                  output_channels=2) -> ModelConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return ModelConfig(patch_size=patch_size, input_channels=input_channels,
                       output_channels=output_channels, max_depth=max_depth,
                       image_size=tuple(image_size), **PRESETS[name])
