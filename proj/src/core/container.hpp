#pragma once

#include <optional>
#include <string>
#include <vector>

#include "encoders.hpp"
#include "gmm.hpp"
#include "linalg.hpp"
#include "svm.hpp"

namespace cfv::io {

struct SvmSection {
    svm::LinearSvmModel model;
    std::vector<std::string> class_names;  // parallel to model.class_ids; may be empty
};

// Versioned container with one CRC32-checked section per fitted model.
// Sections are written in a fixed order (pca, gmm, svm, encoding) so equal
// contents serialize to identical bytes.
struct ModelContainer {
    std::optional<linalg::PcaModel> pca;
    std::optional<gmm::GmmModel> gmm;
    std::optional<SvmSection> svm;
    std::optional<enc::EncodingConfig> encoding;
};

void save_container(const ModelContainer& c, const std::string& path);

// Checksums are validated per section; the GMM whitening cache is recomputed
// and verified against its invariant.
ModelContainer load_container(const std::string& path);

}  // namespace cfv::io
