"""claimlens: dialogue-based information extraction for insurance assessment.

A desk-scale pipeline that replays assessor/claimant transcripts and turns
them into a live keyword feed and report-filling suggestions:

  segmentation -> extraction (BIO tagging) -> linking (KB) -> filtering
  (question/negation gates) -> tracker (keyword lifecycle) -> recommend

Everything is deterministic given a seed; see the service module for the
CLI and the streaming session frontend.
"""

__version__ = "0.1.0"

FORMAT_HEADER = "#claimlens-v1"
EVENTS_HEADER = "#claimlens-events-v1"
MODEL_HEADER = "#claimlens-model-v1"
CONFIG_HEADER = "#claimlens-config-v1"
