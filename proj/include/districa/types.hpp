#ifndef DISTRICA_TYPES_HPP
#define DISTRICA_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "districa/error.hpp"

namespace districa {

using Index = Eigen::Index;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Mat<double>;
using VectorXd = Vec<double>;

using NodeId = int;

/// One block of consecutive columns owned by a network node.
struct ChannelBlock {
  NodeId node = 0;
  Index channels = 0;

  bool operator==(const ChannelBlock&) const = default;
};

using ChannelLayout = std::vector<ChannelBlock>;

inline Index total_channels(const ChannelLayout& layout) {
  return std::accumulate(layout.begin(), layout.end(), Index{0},
                         [](Index acc, const ChannelBlock& b) { return acc + b.channels; });
}

/// N×C block of samples: rows are time instants, columns are channels.
template <typename Scalar>
struct SampleBatch {
  Mat<Scalar> data;
  ChannelLayout layout;

  SampleBatch() = default;

  explicit SampleBatch(Mat<Scalar> values) : data(std::move(values)) {
    layout = {ChannelBlock{0, data.cols()}};
    validate();
  }

  SampleBatch(Mat<Scalar> values, ChannelLayout channel_layout)
      : data(std::move(values)), layout(std::move(channel_layout)) {
    validate();
  }

  Index samples() const { return data.rows(); }
  Index channels() const { return data.cols(); }

  void validate() const {
    require(data.rows() >= 1 && data.cols() >= 1, ErrorKind::InvalidInput,
            "sample batch must have at least one sample and one channel");
    require(total_channels(layout) == data.cols(), ErrorKind::InvalidInput,
            "channel layout does not cover the batch columns");
    require(data.allFinite(), ErrorKind::InvalidInput, "sample batch contains non-finite values");
  }
};

using Batch = SampleBatch<double>;

}  // namespace districa

#endif  // DISTRICA_TYPES_HPP
