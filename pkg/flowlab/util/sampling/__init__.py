from .samplers import SamplerBase, UnitarySampler, NestElementSampler, DerivationSampler, ELEMENT_KINDS
