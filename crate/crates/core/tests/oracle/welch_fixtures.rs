// Frozen with scipy.stats.ttest_ind(a, b, equal_var=False), two-sided.
pub const WELCH_FIXTURES: &[(&[f64], &[f64], f64)] = &[
    (
        &[2.1, 2.5, 2.3, 2.2],
        &[1.1, 1.0, 1.2, 1.4],
        9.83678012778409e-05,
    ),
    (
        &[-0.0268, -0.0137, 0.015],
        &[
            0.8927, 0.4155, 0.6698, 0.6289, 0.6288, 0.5789, 0.2569, 0.7821, 0.272, 0.5426, 0.3506,
            0.7089, 0.3032, 0.7196, 0.301, 0.6839, 0.3295, 0.4562, 0.2231, 0.6504, 0.5876, -0.0106,
            0.7776, 0.4154, 0.6651, 0.3988, 0.3146, 0.2031, 0.6285, 0.5578, 0.4801, 0.1568, 0.6978,
        ],
        2.4903212326612758e-14,
    ),
    (
        &[
            0.6807, 0.8036, 0.5907, 0.8672, 0.7793, 0.9378, 0.5583, 1.04, 0.3514, 0.822, 0.5456,
            1.027, 0.8654, 1.0852, 0.8825, 0.8415, 0.7343, 0.9369, 1.0257, 0.8839, 0.9383, 0.7624,
        ],
        &[
            1.017, 1.0131, 1.0822, 1.0395, 0.9913, 0.9969, 1.2754, 1.048, 0.9981, 0.5722, 0.9403,
            0.9381, 0.8465, 1.0103, 0.8639, 1.0161, 1.0404, 0.9106, 1.1259, 1.1291, 0.9713, 0.997,
            0.9439, 0.7884, 1.097, 1.2119,
        ],
        0.0005548244117458955,
    ),
    (
        &[
            0.5912, 0.6384, 0.6977, 0.7056, 0.6739, 0.6411, 0.6509, 0.8047, 0.6818, 0.7169, 0.6905,
            0.6411, 0.6783, 0.6983, 0.6416, 0.6247, 0.7035, 0.6505, 0.6467, 0.6505, 0.7142, 0.6746,
            0.6828, 0.6872, 0.6328, 0.6304, 0.6991, 0.5895, 0.6232, 0.6001, 0.6407, 0.7216, 0.6614,
            0.5582, 0.7404, 0.7815, 0.6315,
        ],
        &[
            0.4339, 0.5579, 0.5923, 0.5881, 0.4641, 0.5501, 0.4702, 0.52, 0.5445, 0.4729, 0.5391,
            0.4675, 0.5471, 0.5225, 0.4919, 0.482, 0.5711, 0.4964, 0.547, 0.5465, 0.5275, 0.4705,
            0.5136, 0.4964, 0.5065, 0.5141, 0.471, 0.5185, 0.5957,
        ],
        1.1481024497837727e-19,
    ),
    (
        &[0.5261, 0.0558, 0.1505, 0.4522, 0.5059],
        &[
            0.9728, 0.8975, 0.6627, 0.3782, 0.5224, 0.7261, 0.7633, 1.0027,
        ],
        0.010893587515585217,
    ),
    (
        &[
            0.4692, 0.4853, 0.5016, 0.5275, 0.5423, 0.4148, 0.4823, 0.4542, 0.4902, 0.5095,
        ],
        &[
            0.7207, 0.7605, 0.5366, 0.5086, 1.1449, 0.5427, 0.7005, 0.3846, 0.4873,
        ],
        0.07355673752056724,
    ),
    (
        &[
            0.4612, 0.5721, 0.6144, 0.7034, 0.1382, 0.5894, 0.629, 0.6486, 0.4767, 0.8571, 0.9212,
            0.3809, 0.5955, 0.5445, 0.3871, 0.7168, 0.5722, 0.5379, 0.5641, 0.7229, 0.4947,
        ],
        &[
            0.1778, 0.1283, 0.1237, 0.2275, 0.1682, 0.1743, 0.1778, 0.1766, 0.1916, 0.1037, 0.1604,
            0.1569, 0.1782, 0.2104, 0.1909, 0.1158, 0.1769, 0.1644, 0.1586, 0.1693, 0.1793, 0.1969,
            0.1646, 0.2005, 0.1811, 0.1398, 0.224,
        ],
        3.7937205408821557e-10,
    ),
    (
        &[
            0.1321, 0.1069, 0.1674, 0.1259, 0.1315, 0.1424, 0.1204, 0.1056, 0.1241, 0.1661, 0.1179,
            0.1258, 0.1137, 0.1413, 0.1605, 0.1557, 0.1459, 0.1321, 0.1304, 0.1147, 0.1321, 0.1578,
            0.1146, 0.1061, 0.0999, 0.1123, 0.1206, 0.1342, 0.1557, 0.1215, 0.1008, 0.1502, 0.1295,
            0.1702, 0.1463, 0.123, 0.1473,
        ],
        &[
            0.0432, 0.3366, 0.6151, 0.4493, 0.1859, 0.1805, 0.2046, 0.1694, 0.4222, -0.0838,
            0.7234, 0.3131, 0.5266, 0.0133, 0.2835, 0.8155, -0.0494, 0.7312, 0.4645, 0.3764, 0.343,
            0.5769, 0.5857, 0.6094, 0.5257, 0.2685, 0.5176,
        ],
        1.8236592346626305e-05,
    ),
    (
        &[
            0.8832, 0.9746, 0.9848, 0.8922, 0.8275, 0.9584, 0.8654, 0.855, 0.8668, 0.8866,
        ],
        &[
            0.7756, 0.4382, 0.7741, 0.6329, 0.6812, 0.4444, 0.784, 0.9469, 0.8986, 0.9422, 0.7794,
            0.8777, 0.5145, 0.5761, 0.845, 1.047, 0.8626, 0.8953, 0.9775, 0.6639, 0.428, 0.7882,
            0.9159, 0.4676, 0.5813, 1.0686, 0.9421, 0.5643, 0.7495, 0.7483, 0.5121, 0.7722, 0.5183,
            0.9785, 0.8769, 0.8011, 0.6507,
        ],
        8.103506477692369e-05,
    ),
    (
        &[
            0.785, 0.9337, 0.9841, 0.6163, 0.4946, 0.9747, 0.4128, 0.7084,
        ],
        &[
            0.7619, 0.8153, 0.7705, 0.779, 0.7876, 0.8286, 0.7992, 0.7833, 0.8025, 0.8077, 0.7659,
            0.7732, 0.769, 0.7997, 0.7821, 0.7986, 0.7881,
        ],
        0.5387629863951391,
    ),
    (
        &[
            0.1705, 0.1658, 0.2185, 0.3834, 0.2991, 0.3452, 0.3533, 0.2625, 0.1795, 0.3063, 0.2729,
            0.2985, 0.1887, 0.2014, 0.3476, 0.3223, 0.4036,
        ],
        &[
            0.5768, 0.8595, 0.4206, 0.423, 0.7603, 0.4222, 0.5609, 0.3903, 0.5376, 0.3912,
        ],
        0.0005995810000057576,
    ),
    (
        &[0.624, 0.6117, 0.627, 0.6198],
        &[
            0.3756, 0.5068, 0.4173, 0.9254, -0.105, 1.0438, 0.563, -0.0125,
        ],
        0.3059151276015599,
    ),
    (
        &[
            1.0168, 0.937, 0.9387, 1.0218, 0.9157, 0.9384, 0.9816, 1.0837, 1.0033, 0.9281, 0.9769,
        ],
        &[
            -0.1312, 0.0287, 0.0969, 0.1331, 0.1373, 0.4374, -0.0905, 0.2699, 0.3331, 0.5545,
            -0.1554, -0.0606, 0.0213, -0.1653, 0.1235, 0.1308, 0.6593, 0.3099, 0.6297, 0.4249,
            0.3879, -0.207, 0.5464, -0.3301, 0.2113, -0.2697, -0.643, 0.3177, 0.4153, 0.3181,
            -0.0713, 0.6552, 0.0351, -0.7146, 0.0154,
        ],
        4.045407945921043e-17,
    ),
    (
        &[0.8441, 1.0358, 1.0156],
        &[
            -0.1893, 0.2775, -0.0112, 0.0392, 0.3715, 0.2931, 0.1582, 0.2022, 0.1601, 0.1226,
            -0.3104, 0.0398,
        ],
        3.6429012827675845e-05,
    ),
    (
        &[
            0.9794, 1.0356, 1.0309, 1.0078, 1.012, 1.0195, 0.9657, 1.0097, 0.9669, 0.9928, 0.9978,
            1.0017, 1.001, 0.9687, 0.9098, 0.9712, 1.0016, 0.9997, 1.0082, 0.9852, 0.9664, 0.9924,
            1.0208,
        ],
        &[
            0.3407, -0.0838, 0.6503, 1.0006, 0.2766, 0.3842, 0.7006, 0.3306, -0.068, 0.3904,
            0.4683, 0.1981, 0.5662, 0.0771, -0.0244,
        ],
        9.963473280561852e-07,
    ),
    (
        &[
            0.3041, 0.2817, 0.2931, 0.2858, 0.2981, 0.2793, 0.2702, 0.3008, 0.3041, 0.2887, 0.272,
            0.2946, 0.2811,
        ],
        &[
            0.5783, 0.5857, 0.1831, 0.5448, 0.4864, 0.1863, 0.1273, 0.7905, 0.0795, 0.3387, 0.3812,
            0.3485, 0.4718, 0.333, 0.3097, 0.41,
        ],
        0.06123442451647036,
    ),
    (
        &[
            0.1589, -0.1034, 0.0815, -0.0872, -0.1746, 0.4876, -0.2098, 0.0221, 0.0781, 0.16,
        ],
        &[
            0.3406, 0.3538, 0.3608, 0.35, 0.357, 0.3676, 0.3454, 0.3523, 0.3482, 0.351, 0.3422,
            0.3566, 0.3426, 0.3492, 0.3722, 0.3407,
        ],
        0.0009777186811776245,
    ),
    (
        &[
            0.27, 0.0472, 0.102, 0.0243, 0.0096, 0.0595, 0.2594, 0.0669, -0.3848, -0.0084, -0.1156,
            -0.007, -0.2187, 0.0222, 0.1724, 0.0128, -0.1022,
        ],
        &[
            -0.0061, 0.181, 0.0522, 0.0604, 0.0241, 0.0217, 0.0882, -0.1132, -0.0556, 0.0839,
            0.0764, -0.0926, -0.1293, -0.0086, 0.0997, -0.0779, 0.2206, -0.0461, 0.0118, 0.0801,
            0.0534, 0.0281, 0.0865, -0.0295,
        ],
        0.7621467899054344,
    ),
    (
        &[
            0.3343, 0.3406, 0.3002, 0.4675, 0.2782, 0.3194, 0.3824, 0.2271, 0.4029, 0.2442, 0.4307,
            0.5397, 0.3495, 0.3168, 0.1915, 0.3314, 0.5165, 0.4296,
        ],
        &[
            0.8766, 0.8653, 0.8802, 0.8825, 0.885, 0.8699, 0.8658, 0.8755, 0.888, 0.8709, 0.8621,
            0.8848, 0.8664, 0.8811, 0.8887, 0.8673, 0.8874,
        ],
        2.0029864211117474e-14,
    ),
    (
        &[
            0.4019, 0.0555, -0.2026, -0.0117, -0.5566, -0.0073, 0.5424, 0.7803, 0.326, 0.3192,
            0.4633, -0.1177, 0.1408, 0.4783, 0.374, 0.4669, 0.6497, 0.0719, 0.0741,
        ],
        &[0.2629, 0.8257, 0.6961, 0.225],
        0.16562737239088027,
    ),
];
