#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/container.hpp"
#include "core/rng.hpp"
#include "test_util.hpp"

using namespace cfv;
using namespace cfv::io;

namespace {

std::string read_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ModelContainer full_container(Rng& rng) {
    ModelContainer c;
    Matrix pts = testutil::random_matrix(rng, 50, 5, -2.0, 2.0);
    c.pca = linalg::pca_fit(pts, 3);
    c.gmm = testutil::random_model(rng, 3, 3, gmm::CovarianceKind::full);
    svm::TrainConfig cfg;
    cfg.seed = 1;
    Matrix f = testutil::random_matrix(rng, 20, 4);
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) y.push_back(i % 2);
    SvmSection s;
    s.model = svm::train_ova(f, y, cfg);
    s.class_names = {"neg", "pos"};
    c.svm = s;
    c.encoding = enc::EncodingConfig{};
    return c;
}

}  // namespace

TEST_CASE("container round-trips to identical bytes") {
    Rng rng(601);
    ModelContainer c = full_container(rng);
    namespace fs = std::filesystem;
    const std::string p1 = (fs::temp_directory_path() / "c1.cfvm").string();
    const std::string p2 = (fs::temp_directory_path() / "c2.cfvm").string();
    save_container(c, p1);
    ModelContainer loaded = load_container(p1);
    REQUIRE(loaded.pca.has_value());
    REQUIRE(loaded.gmm.has_value());
    REQUIRE(loaded.svm.has_value());
    REQUIRE(loaded.encoding.has_value());
    save_container(loaded, p2);
    CHECK(read_bytes(p1) == read_bytes(p2));

    // Loaded models behave like the originals.
    CHECK(loaded.gmm->K == c.gmm->K);
    CHECK(loaded.svm->class_names == std::vector<std::string>{"neg", "pos"});
    Vector x = {0.1, -0.2, 0.3};
    Vector pa = c.gmm->posterior(x), pb = loaded.gmm->posterior(x);
    for (std::size_t k = 0; k < pa.size(); ++k) CHECK(pa[k] == pb[k]);
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("partial containers round-trip too") {
    Rng rng(603);
    ModelContainer c;
    c.gmm = testutil::random_model(rng, 2, 2, gmm::CovarianceKind::diagonal);
    namespace fs = std::filesystem;
    const std::string p = (fs::temp_directory_path() / "partial.cfvm").string();
    save_container(c, p);
    ModelContainer loaded = load_container(p);
    CHECK(loaded.gmm.has_value());
    CHECK(!loaded.pca.has_value());
    CHECK(!loaded.svm.has_value());
    fs::remove(p);
}

TEST_CASE("corrupted payload bytes fail the checksum") {
    Rng rng(605);
    ModelContainer c = full_container(rng);
    namespace fs = std::filesystem;
    const std::string p = (fs::temp_directory_path() / "bad.cfvm").string();
    save_container(c, p);
    std::string bytes = read_bytes(p);
    bytes[bytes.size() / 2] ^= 0x40;  // flip a bit mid-payload
    write_bytes(p, bytes);
    CHECK_THROWS_WITH_AS(load_container(p), doctest::Contains("checksum"), Error);
    fs::remove(p);
}

TEST_CASE("newer container versions are rejected") {
    Rng rng(607);
    ModelContainer c = full_container(rng);
    namespace fs = std::filesystem;
    const std::string p = (fs::temp_directory_path() / "ver.cfvm").string();
    save_container(c, p);
    std::string bytes = read_bytes(p);
    bytes[4] = 9;  // version field follows the 4-byte magic
    write_bytes(p, bytes);
    CHECK_THROWS_WITH_AS(load_container(p), doctest::Contains("version"), Error);
    fs::remove(p);
}

TEST_CASE("gmm cache is rebuilt and verified on load") {
    Rng rng(609);
    ModelContainer c;
    c.gmm = testutil::random_model(rng, 2, 3, gmm::CovarianceKind::full);
    namespace fs = std::filesystem;
    const std::string p = (fs::temp_directory_path() / "cache.cfvm").string();
    save_container(c, p);
    ModelContainer loaded = load_container(p);
    loaded.gmm->verify_cache(1e-6);

    // A cache that does not match its covariance fails verification.
    gmm::GmmModel broken = *loaded.gmm;
    broken.inv_sqrt_cov[0].at(0, 0) *= 2.0;
    CHECK_THROWS_AS(broken.verify_cache(1e-6), Error);
    fs::remove(p);
}

TEST_CASE("truncated containers are rejected") {
    Rng rng(611);
    ModelContainer c = full_container(rng);
    namespace fs = std::filesystem;
    const std::string p = (fs::temp_directory_path() / "trunc.cfvm").string();
    save_container(c, p);
    std::string bytes = read_bytes(p);
    write_bytes(p, bytes.substr(0, bytes.size() / 3));
    CHECK_THROWS_AS(load_container(p), Error);
    write_bytes(p, "CFVX");
    CHECK_THROWS_WITH_AS(load_container(p), doctest::Contains("bad magic"), Error);
    fs::remove(p);
}
