//! Oracle values computed with exact rational arithmetic.

pub struct Fixture {
    pub truth: f64,
    pub predictions: &'static [f64],
    pub errors: &'static [f64],
    pub rmse: f64,
    pub group_point_error: f64,
    pub sd: f64,
}

pub const METRIC_FIXTURES: [Fixture; 24] = [
    Fixture {
        truth: 19.8,
        predictions: &[46.12, 35.48],
        errors: &[132.92929292929293, 79.1919191919192],
        rmse: 109.4110528785397,
        group_point_error: 106.06060606060606,
        sd: 7.523616151824866,
    },
    Fixture {
        truth: 310.0,
        predictions: &[721.31, 688.8, 643.43],
        errors: &[132.68064516129033, 122.19354838709677, 107.55806451612904],
        rmse: 121.24926681606748,
        group_point_error: 120.81075268817204,
        sd: 39.11655957945859,
    },
    Fixture {
        truth: 130.0,
        predictions: &[78.93, 163.59, 374.6, 153.41, 115.77],
        errors: &[
            -39.284615384615385,
            25.838461538461537,
            188.15384615384616,
            18.00769230769231,
            -10.946153846153846,
        ],
        rmse: 87.24319135537067,
        group_point_error: 36.353846153846156,
        sd: 115.26987464207636,
    },
    Fixture {
        truth: 14.05,
        predictions: &[28.07, 10.55, 23.09, 1.94, 36.12, 40.75, 3.53, 24.91],
        errors: &[
            99.7864768683274,
            -24.91103202846975,
            64.34163701067615,
            -86.19217081850533,
            157.08185053380782,
            190.0355871886121,
            -74.87544483985765,
            77.29537366548043,
        ],
        rmse: 108.69451241980644,
        group_point_error: 50.320284697508896,
        sd: 14.471103225788577,
    },
    Fixture {
        truth: 2000.0,
        predictions: &[
            5598.79, 5808.15, 2260.51, 1804.99, 1003.29, 2378.66, 1855.49, 396.52, 4374.46, 1574.6, 2724.75, 2265.09,
        ],
        errors: &[
            179.9395, 190.4075, 13.0255, -9.7505, -49.8355, 18.933, -7.2255, -80.174, 118.723, -21.27, 36.2375, 13.2545,
        ],
        rmse: 88.62678822737513,
        group_point_error: 33.522083333333335,
        sd: 1713.8126581176375,
    },
    Fixture {
        truth: 120.0,
        predictions: &[
            201.23, 327.97, 166.2, 322.0, 76.11, 193.05, 89.18, 199.53, 320.83, 291.27, 63.01, 336.59, 305.6, 297.86,
            136.31, 222.69, 209.89, 332.11, 293.91, 295.8, 347.86, 158.4, 159.16, 310.13, 246.08, 252.8, 314.94,
            325.62, 248.16, 29.74,
        ],
        errors: &[
            67.69166666666666,
            173.30833333333334,
            38.5,
            168.33333333333334,
            -36.575,
            60.875,
            -25.683333333333334,
            66.275,
            167.35833333333332,
            142.725,
            -47.49166666666667,
            180.49166666666667,
            154.66666666666666,
            148.21666666666667,
            13.591666666666667,
            85.575,
            74.90833333333333,
            176.75833333333333,
            144.925,
            146.5,
            189.88333333333333,
            32.0,
            32.63333333333333,
            158.44166666666666,
            105.06666666666666,
            110.66666666666667,
            162.45,
            171.35,
            106.8,
            -75.21666666666667,
        ],
        rmse: 122.44875019211553,
        group_point_error: 96.50083333333333,
        sd: 91.99541545361247,
    },
    Fixture {
        truth: 601.25,
        predictions: &[898.59, 898.92],
        errors: &[49.45363825363825, 49.508523908523905],
        rmse: 49.48108869114844,
        group_point_error: 49.48108108108108,
        sd: 0.2333452377915607,
    },
    Fixture {
        truth: 4489.25,
        predictions: &[214.13, 9704.33, 4010.15],
        errors: &[-95.2301609400234, 116.16817954001225, -10.672161274154925],
        rmse: 86.94389861009005,
        group_point_error: 3.4219524419446454,
        sd: 4776.633224228128,
    },
    Fixture {
        truth: 1500.0,
        predictions: &[3736.71, 392.07, 338.8, 1808.53, 146.6],
        errors: &[
            149.114,
            -73.862,
            -77.41333333333333,
            20.568666666666665,
            -90.22666666666667,
        ],
        rmse: 91.9209721924219,
        group_point_error: 14.363866666666667,
        sd: 1522.6241756487384,
    },
    Fixture {
        truth: 300.0,
        predictions: &[267.0, 633.28, 509.12, 700.46, 282.59, 824.97, 873.13, 689.93],
        errors: &[
            -11.0,
            111.09333333333333,
            69.70666666666666,
            133.48666666666668,
            -5.803333333333334,
            174.99,
            191.04333333333332,
            129.97666666666666,
        ],
        rmse: 122.05895406182483,
        group_point_error: 99.18666666666667,
        sd: 228.14416695213953,
    },
    Fixture {
        truth: 42.88,
        predictions: &[
            41.09, 38.54, 7.98, 121.94, 121.04, 111.42, 90.56, 35.37, 62.65, 90.31, 99.37, 101.63,
        ],
        errors: &[
            -4.174440298507463,
            -10.121268656716419,
            -81.38992537313433,
            184.375,
            182.27611940298507,
            159.84141791044777,
            111.19402985074628,
            -17.51399253731343,
            46.105410447761194,
            110.61100746268657,
            131.73973880597015,
            137.01026119402985,
        ],
        rmse: 116.42977701141704,
        group_point_error: 79.16277985074628,
        sd: 38.237317683597574,
    },
    Fixture {
        truth: 120.0,
        predictions: &[
            115.75, 111.99, 309.71, 167.73, 297.94, 317.33, 148.88, 165.82, 242.75, 124.93, 287.48, 48.88, 140.16,
            7.93, 118.17, 48.94, 324.9, 246.45, 318.12, 287.32, 12.24, 185.23, 82.69, 173.46, 201.16, 9.78, 251.99,
            356.6, 23.41, 215.56,
        ],
        errors: &[
            -3.5416666666666665,
            -6.675,
            158.09166666666667,
            39.775,
            148.28333333333333,
            164.44166666666666,
            24.066666666666666,
            38.18333333333333,
            102.29166666666667,
            4.108333333333333,
            139.56666666666666,
            -59.266666666666666,
            16.8,
            -93.39166666666667,
            -1.525,
            -59.21666666666667,
            170.75,
            105.375,
            165.1,
            139.43333333333334,
            -89.8,
            54.358333333333334,
            -31.091666666666665,
            44.55,
            67.63333333333334,
            -91.85,
            109.99166666666666,
            197.16666666666666,
            -80.49166666666666,
            79.63333333333334,
        ],
        rmse: 100.23583041544612,
        group_point_error: 48.425,
        sd: 107.11528021329363,
    },
    Fixture {
        truth: 19.8,
        predictions: &[7.86, 49.64],
        errors: &[-60.303030303030305, 150.7070707070707],
        rmse: 114.78039167217152,
        group_point_error: 45.2020202020202,
        sd: 29.542921317973956,
    },
    Fixture {
        truth: 310.0,
        predictions: &[547.38, 101.47, 213.69],
        errors: &[76.5741935483871, -67.26774193548387, -31.06774193548387],
        rmse: 61.518996555683316,
        group_point_error: 7.253763440860215,
        sd: 231.94039198322773,
    },
    Fixture {
        truth: 130.0,
        predictions: &[146.05, 224.33, 93.31, 122.68, 270.65],
        errors: &[
            12.346153846153847,
            72.56153846153846,
            -28.223076923076924,
            -5.630769230769231,
            108.1923076923077,
        ],
        rmse: 59.9189910723158,
        group_point_error: 31.84923076923077,
        sd: 73.76729681911897,
    },
    Fixture {
        truth: 14.05,
        predictions: &[32.18, 38.46, 9.13, 15.61, 41.07, 1.97, 22.34, 10.91],
        errors: &[
            129.0391459074733,
            173.73665480427047,
            -35.01779359430605,
            11.103202846975089,
            192.31316725978647,
            -85.97864768683274,
            59.00355871886121,
            -22.348754448398576,
        ],
        rmse: 109.8536653389493,
        group_point_error: 52.73131672597865,
        sd: 14.474898901694813,
    },
    Fixture {
        truth: 2000.0,
        predictions: &[
            1900.61, 29.32, 3543.05, 2592.72, 4637.22, 2237.72, 5060.72, 1597.54, 2087.5, 3095.79, 1570.11, 1782.47,
        ],
        errors: &[
            -4.9695, -98.534, 77.1525, 29.636, 131.861, 11.886, 153.036, -20.123, 4.375, 54.7895, -21.4945, -10.8765,
        ],
        rmse: 71.60036097339757,
        group_point_error: 25.561541666666667,
        sd: 1397.1221245471859,
    },
    Fixture {
        truth: 120.0,
        predictions: &[
            64.16, 214.48, 254.51, 123.68, 63.16, 184.45, 213.48, 150.24, 303.57, 20.87, 104.78, 107.58, 262.02,
            162.88, 331.44, 299.61, 85.1, 147.08, 231.55, 65.24, 2.18, 43.17, 159.59, 183.78, 322.15, 295.64, 90.24,
            169.47, 282.18, 272.19,
        ],
        errors: &[
            -46.53333333333333,
            78.73333333333333,
            112.09166666666667,
            3.066666666666667,
            -47.36666666666667,
            53.708333333333336,
            77.9,
            25.2,
            152.975,
            -82.60833333333333,
            -12.683333333333334,
            -10.35,
            118.35,
            35.733333333333334,
            176.2,
            149.675,
            -29.083333333333332,
            22.566666666666666,
            92.95833333333333,
            -45.63333333333333,
            -98.18333333333334,
            -64.025,
            32.99166666666667,
            53.15,
            168.45833333333334,
            146.36666666666667,
            -24.8,
            41.225,
            135.15,
            126.825,
        ],
        rmse: 90.95664350494242,
        group_point_error: 44.735277777777775,
        sd: 96.65876839770368,
    },
    Fixture {
        truth: 601.25,
        predictions: &[1662.26, 1000.82],
        errors: &[176.46735966735966, 66.45654885654886],
        rmse: 133.3364202194812,
        group_point_error: 121.46195426195426,
        sd: 467.70870934802997,
    },
    Fixture {
        truth: 4489.25,
        predictions: &[7531.64, 11230.23, 9102.95],
        errors: &[67.77056301163891, 150.15826697109762, 102.77217798073175],
        rmse: 112.1048243350558,
        group_point_error: 106.90033598782276,
        sd: 1856.246360382515,
    },
    Fixture {
        truth: 1500.0,
        predictions: &[3197.29, 776.54, 2125.82, 3961.92, 1331.4],
        errors: &[
            113.15266666666666,
            -48.230666666666664,
            41.721333333333334,
            164.128,
            -11.24,
        ],
        rmse: 93.73871219512246,
        group_point_error: 51.90626666666667,
        sd: 1309.0331690144449,
    },
    Fixture {
        truth: 300.0,
        predictions: &[63.96, 615.6, 426.57, 705.11, 404.0, 140.56, 272.74, 352.0],
        errors: &[
            -78.68,
            105.2,
            42.19,
            135.03666666666666,
            34.666666666666664,
            -53.14666666666667,
            -9.086666666666666,
            17.333333333333332,
        ],
        rmse: 72.18192100134523,
        group_point_error: 24.189166666666665,
        sd: 218.11144050363666,
    },
    Fixture {
        truth: 42.88,
        predictions: &[
            81.71, 54.64, 1.22, 52.98, 118.42, 94.26, 3.3, 5.57, 106.67, 114.48, 114.48, 68.37,
        ],
        errors: &[
            90.55503731343283,
            27.425373134328357,
            -97.15485074626865,
            23.55410447761194,
            176.1660447761194,
            119.82276119402985,
            -92.30410447761194,
            -87.01026119402985,
            148.76399253731344,
            166.97761194029852,
            166.97761194029852,
            59.444962686567166,
        ],
        rmse: 116.13803004305402,
        group_point_error: 58.6015236318408,
        sd: 44.90724497801164,
    },
    Fixture {
        truth: 120.0,
        predictions: &[
            157.61, 15.83, 47.9, 108.37, 118.78, 309.5, 91.62, 125.99, 21.17, 124.7, 240.5, 226.57, 297.9, 68.06,
            60.44, 285.15, 339.36, 67.64, 165.33, 105.82, 20.31, 277.9, 284.31, 185.24, 93.89, 212.49, 183.33, 94.63,
            186.27, 194.98,
        ],
        errors: &[
            31.341666666666665,
            -86.80833333333334,
            -60.083333333333336,
            -9.691666666666666,
            -1.0166666666666666,
            157.91666666666666,
            -23.65,
            4.991666666666666,
            -82.35833333333333,
            3.9166666666666665,
            100.41666666666667,
            88.80833333333334,
            148.25,
            -43.28333333333333,
            -49.63333333333333,
            137.625,
            182.8,
            -43.63333333333333,
            37.775,
            -11.816666666666666,
            -83.075,
            131.58333333333334,
            136.925,
            54.36666666666667,
            -21.758333333333333,
            77.075,
            52.775,
            -21.141666666666666,
            55.225,
            62.483333333333334,
        ],
        rmse: 83.10141978274142,
        group_point_error: 30.8775,
        sd: 94.16507911732678,
    },
];
