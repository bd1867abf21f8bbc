#pragma once

#include "symdx/corpus.hpp"
#include "symdx/error.hpp"
#include "symdx/numkit.hpp"
#include "symdx/rng.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace symdx::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        std::string name = "symdx_";
        if (info)
            name += std::string(info->test_suite_name()) + "_" + info->name();
        name += "_" + std::to_string(counter++);
        for (auto& c : name)
            if (c == '/')
                c = '_';
        path_ = std::filesystem::temp_directory_path() / name;
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

template <typename F>
void expect_error(ErrorCode code, F&& fn)
{
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

inline void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

inline numkit::Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double lo = -1.0,
                                    double hi = 1.0)
{
    Rng rng(seed);
    numkit::Matrix m(r, c);
    for (auto& v : m.data())
        v = rng.uniform(lo, hi);
    return m;
}

inline corpus::DesignMatrix design(numkit::Matrix x, std::vector<int> labels, std::size_t classes)
{
    corpus::DesignMatrix m;
    for (std::size_t c = 0; c < classes; ++c)
        m.class_names.push_back("class_" + std::to_string(c));
    for (std::size_t j = 0; j < x.cols(); ++j)
        m.feature_names.push_back("f" + std::to_string(j));
    m.features = std::move(x);
    m.labels = std::move(labels);
    return m;
}

// Gaussian-ish blobs around well separated centers, `per_class` rows each.
inline corpus::DesignMatrix blobs(std::size_t classes, std::size_t per_class, std::size_t dims,
                                  std::uint64_t seed, double spread = 0.1)
{
    Rng rng(seed);
    numkit::Matrix x(classes * per_class, dims);
    std::vector<int> labels;
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            const std::size_t r = c * per_class + i;
            for (std::size_t j = 0; j < dims; ++j)
                x(r, j) = (j % classes == c ? 1.0 : 0.0) + rng.uniform(-spread, spread);
            labels.push_back(static_cast<int>(c));
        }
    return design(std::move(x), std::move(labels), classes);
}

} // namespace symdx::test
