#include "cpf/metric.hpp"

#include <cstring>

namespace cpf {

Prototype cluster_prototype(std::span<const int> members, const MixedDataset& data) {
    if (members.empty()) throw DataError("cluster_prototype: empty member set");
    Prototype proto;
    proto.numeric.assign(data.p_num, 0.0);
    const double inv = 1.0 / static_cast<double>(members.size());
    for (int idx : members) {
        const double* z = data.numeric_row(static_cast<std::size_t>(idx));
        for (std::size_t f = 0; f < data.p_num; ++f) proto.numeric[f] += z[f];
    }
    for (double& v : proto.numeric) v *= inv;

    proto.categorical.reserve(data.p_cat);
    for (std::size_t f = 0; f < data.p_cat; ++f)
        proto.categorical.emplace_back(data.model.categorical[f].categories.size(), 0.0);
    for (int idx : members) {
        const int32_t* b = data.categorical_row(static_cast<std::size_t>(idx));
        for (std::size_t f = 0; f < data.p_cat; ++f) proto.categorical[f][b[f]] += 1.0;
    }
    for (auto& v : proto.categorical)
        for (double& x : v) x *= inv;
    return proto;
}

std::size_t embedding_dim(const MixedDataset& data) {
    std::size_t dim = data.p_num;
    for (const auto& enc : data.model.categorical) dim += enc.categories.size();
    return dim;
}

void embed_point(const MixedDataset& data, std::size_t i, double* out) {
    std::memcpy(out, data.numeric_row(i), data.p_num * sizeof(double));
    std::size_t offset = data.p_num;
    const int32_t* b = data.categorical_row(i);
    for (std::size_t f = 0; f < data.p_cat; ++f) {
        const std::size_t m = data.cat_term[f].size();
        for (std::size_t q = 0; q < m; ++q) out[offset + q] = 0.0;
        out[offset + b[f]] = std::sqrt(data.cat_term[f][b[f]]);
        offset += m;
    }
}

std::vector<double> embed_all(const MixedDataset& data) {
    const std::size_t dim = embedding_dim(data);
    std::vector<double> out(data.n * dim);
    for (std::size_t i = 0; i < data.n; ++i) embed_point(data, i, out.data() + i * dim);
    return out;
}

}  // namespace cpf
