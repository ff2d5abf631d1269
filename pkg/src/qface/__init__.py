"""Statevector simulation of a quantum face-recognition pipeline.

Ghost-imaged faces are matched against a database with the log-determinant
divergence, whose trace and determinant can be evaluated either classically
or through simulated circuits (Fourier adder, phase estimation, HHL).
"""

__version__ = "0.1.0"

from .determinant import determinant_quantum, run_determinant
from .divergence import FaceMatrix, logdet_divergence, match_face, prepare_face_matrix
from .errors import QFaceError
from .ghost import FaceImage, GhostConfig, GhostImage, snr_estimate, synthesize
from .hhl import hhl_solve, matrix_ratio, qica_unmix
from .linalg import Matrix, det_classical, eig_hermitian, trace_classical
from .pipeline import MatchReport, PipelineConfig, gate_count_sweep, run_pipeline
from .qpca import EigenfaceBasis, TrainingSet, build_covariance, qpca_eigenfaces
from .statevector import QubitRegister
from .trace_circuit import BinaryEncodedDiagonal, trace_quantum

__all__ = [
    "BinaryEncodedDiagonal", "EigenfaceBasis", "FaceImage", "FaceMatrix", "GhostConfig", "GhostImage",
    "MatchReport", "Matrix", "PipelineConfig", "QFaceError", "QubitRegister", "TrainingSet",
    "build_covariance", "det_classical", "determinant_quantum", "eig_hermitian", "gate_count_sweep",
    "hhl_solve", "logdet_divergence", "match_face", "matrix_ratio", "prepare_face_matrix",
    "qica_unmix", "qpca_eigenfaces", "run_determinant", "run_pipeline", "snr_estimate", "synthesize",
    "trace_classical", "trace_quantum",
]
