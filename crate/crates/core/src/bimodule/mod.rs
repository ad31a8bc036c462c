//! Transfer operators, the bimodules `E_(m,n)` and their kernels.

pub mod frame;
pub mod function;
pub mod kernel;
pub mod operator;
pub mod product;

pub use frame::{check_reconstruction, frame_compute, reconstruct, Frame, FrameElement, ReconstructionReport};
pub use function::{CellFunction, CylinderFunction, LaurentPoly};
pub use kernel::{
    apply_kernel, apply_laurent_kernel, compactness_growth_diagnostic, convolution_check,
    convolution_check_laurent, kernel_convolve, kernel_convolve_laurent, left_action_blocks,
    theta_kernel, theta_kernel_laurent, CompactnessReport, CompactnessRow, ConvolutionReport,
    LaurentKernel,
};
pub use operator::{
    alpha, alpha_matrix, alpha_n, check_commuting_expectations, expectation, expectation_matrix,
    inner_product, inner_product_n, left_action_matrix, operator_identities, transfer,
    transfer_matrix, transfer_n, BasisTag, CommuteReport, IdentityReport, OperatorMatrix,
    OperatorTag, Resolution,
};
pub use product::{
    flip, flip_unitary_check, lemma_check, phi_iso, phi_iso_inv, scalar_flip_unitary,
    tensor_inner, BimoduleHandle, FlipReport, LemmaReport, Tensor,
};
