#include "loco/dataset_io.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace loco {

namespace {

constexpr char kMagic[8] = {'L', 'O', 'C', 'O', 'M', 'A', 'T', '1'};

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_matrix_file(const std::string& path, const DenseMatrix& x, const Vector& y) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_u64(os, x.rows);
    write_u64(os, x.cols);
    write_u64(os, 0);  // column-major
    os.write(reinterpret_cast<const char*>(x.data.data()),
             static_cast<std::streamsize>(x.data.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(y.data()),
             static_cast<std::streamsize>(y.size() * sizeof(double)));
    if (!os) throw IoError("write failed: " + path);
}

void read_matrix_file(const std::string& path, DenseMatrix& x, Vector& y) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError("bad magic in dataset file: " + path);
    const std::uint64_t n = read_u64(is);
    const std::uint64_t p = read_u64(is);
    const std::uint64_t layout = read_u64(is);
    if (layout != 0) throw IoError("unsupported layout in dataset file: " + path);
    x = DenseMatrix(n, p);
    y.resize(n);
    is.read(reinterpret_cast<char*>(x.data.data()),
            static_cast<std::streamsize>(x.data.size() * sizeof(double)));
    is.read(reinterpret_cast<char*>(y.data()),
            static_cast<std::streamsize>(y.size() * sizeof(double)));
    if (!is) throw IoError("truncated dataset file: " + path);
}

}  // namespace

void write_dataset(const std::string& base_path, const SimulatedDataset& ds) {
    write_matrix_file(base_path + ".train.bin", ds.x_train, ds.y_train);
    write_matrix_file(base_path + ".test.bin", ds.x_test, ds.y_test);

    nlohmann::json side;
    side["spec"] = {{"n", ds.spec.n},
                    {"p", ds.spec.p},
                    {"num_blocks", ds.spec.num_blocks},
                    {"sigma_r", ds.spec.sigma_r},
                    {"snr", ds.spec.snr},
                    {"seed", ds.spec.seed},
                    {"n_test", ds.spec.n_test},
                    {"allow_mean_reuse", ds.spec.allow_mean_reuse}};
    side["sigma_s"] = ds.sigma_s;
    side["beta_star"] = ds.beta_star;
    side["permutation"] = ds.permutation;
    side["block_of"] = ds.block_of;
    side["y_train_clean"] = ds.y_train_clean;
    side["y_test_clean"] = ds.y_test_clean;
    side["files"] = {{"train", base_path + ".train.bin"}, {"test", base_path + ".test.bin"}};

    std::ofstream os(base_path + ".json");
    if (!os) throw IoError("cannot open for writing: " + base_path + ".json");
    os << side.dump(2) << "\n";
}

SimulatedDataset load_dataset(const std::string& base_path) {
    std::ifstream is(base_path + ".json");
    if (!is) throw IoError("cannot open for reading: " + base_path + ".json");
    nlohmann::json side;
    is >> side;

    SimulatedDataset ds;
    const auto& sp = side.at("spec");
    ds.spec.n = sp.at("n").get<std::size_t>();
    ds.spec.p = sp.at("p").get<std::size_t>();
    ds.spec.num_blocks = sp.at("num_blocks").get<std::size_t>();
    ds.spec.sigma_r = sp.at("sigma_r").get<std::vector<double>>();
    ds.spec.snr = sp.at("snr").get<double>();
    ds.spec.seed = sp.at("seed").get<std::uint64_t>();
    ds.spec.n_test = sp.at("n_test").get<std::size_t>();
    ds.spec.allow_mean_reuse = sp.at("allow_mean_reuse").get<bool>();
    ds.sigma_s = side.at("sigma_s").get<double>();
    ds.beta_star = side.at("beta_star").get<Vector>();
    ds.permutation = side.at("permutation").get<std::vector<std::size_t>>();
    ds.block_of = side.at("block_of").get<std::vector<std::size_t>>();
    ds.y_train_clean = side.at("y_train_clean").get<Vector>();
    ds.y_test_clean = side.at("y_test_clean").get<Vector>();

    read_matrix_file(base_path + ".train.bin", ds.x_train, ds.y_train);
    read_matrix_file(base_path + ".test.bin", ds.x_test, ds.y_test);
    return ds;
}

}  // namespace loco
